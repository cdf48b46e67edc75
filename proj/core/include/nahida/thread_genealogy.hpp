// Copyright 2026 the Nahida Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

// Thread genealogy: who created whom, with identities tracked across nested
// pid namespaces. Records are registered at thread creation with the full
// namespace identity table, so a thread can later be resolved from any
// (namespace, local tid) pair it is known by.

namespace nahida {

using ThreadId = std::uint64_t;     // thread id in the root namespace
using NamespaceId = std::uint64_t;  // opaque namespace handle

inline constexpr NamespaceId kRootNamespace = 0;

struct NamespaceTid {
  NamespaceId ns = kRootNamespace;
  std::uint64_t local_tid = 0;

  bool operator==(const NamespaceTid&) const = default;
};

// One thread as seen by the registry. ns_ids holds the identity per
// namespace level, outermost first: entry 0 is the root namespace and its
// local tid equals root_tid; level indexes the deepest entry, so ns_ids has
// exactly level + 1 entries.
struct ThreadRecord {
  ThreadId root_tid = 0;
  std::vector<NamespaceTid> ns_ids;
  std::uint32_t level = 0;
  std::optional<ThreadId> parent_root_tid;
};

class GenealogyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Registry of live and recently dead threads. Mutations happen from the
// single event-processing context; read-only inspection may run
// concurrently.
class ThreadRegistry {
 public:
  struct Counters {
    std::uint64_t unknown_parents = 0;  // registrations naming an unseen parent
    std::uint64_t unknown_exits = 0;    // exits for threads never registered
  };

  // Registers a thread. Throws GenealogyError on a structurally invalid
  // record, a duplicate live root_tid, a live (namespace, local tid)
  // collision, or a parent chain that would loop back to this thread. A
  // named parent that was never registered is tolerated: the record is kept
  // with an absent parent and unknown_parents is incremented. Registering
  // over a dead retained record replaces it (pid reuse).
  void register_thread(const ThreadRecord& record);

  // Root-namespace id of the live thread known as (ns, local_tid); absent
  // if no live thread matches. Dead threads do not resolve.
  std::optional<ThreadId> resolve(NamespaceId ns, std::uint64_t local_tid) const;

  // Registered parent link, valid for dead retained records as well so that
  // ancestor walks stay usable for in-flight requests.
  std::optional<ThreadId> parent_of(ThreadId root_tid) const;

  // Marks a thread dead and withdraws its namespace identities. The record
  // itself is retained until collect() removes it. Unknown tids increment
  // unknown_exits and are otherwise ignored.
  void mark_exit(ThreadId root_tid);

  // Removes the record if it is dead and no registered child still points
  // at it, then retries on its parent, which may have become collectible.
  // Live or still-referenced records are left alone.
  void collect(ThreadId root_tid);

  bool contains(ThreadId root_tid) const;
  bool is_alive(ThreadId root_tid) const;
  std::size_t size() const;
  Counters counters() const;

 private:
  struct Entry {
    ThreadRecord record;
    bool alive = true;
    std::uint32_t child_count = 0;
  };

  void check_record(const ThreadRecord& record) const;

  mutable std::shared_mutex mutex_;
  std::unordered_map<ThreadId, Entry> threads_;
  std::map<std::pair<NamespaceId, std::uint64_t>, ThreadId> by_namespace_;
  Counters counters_;
};

}  // namespace nahida
