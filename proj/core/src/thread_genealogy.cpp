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

#include "nahida/thread_genealogy.hpp"

#include <mutex>
#include <string>

namespace nahida {

void ThreadRegistry::check_record(const ThreadRecord& record) const {
  if (record.ns_ids.empty()) {
    throw GenealogyError("thread record has no namespace identities");
  }
  if (record.ns_ids.size() != static_cast<std::size_t>(record.level) + 1) {
    throw GenealogyError("thread record level disagrees with ns_ids size");
  }
  if (record.ns_ids.front().ns != kRootNamespace ||
      record.ns_ids.front().local_tid != record.root_tid) {
    throw GenealogyError("thread record entry 0 must carry the root identity");
  }
}

void ThreadRegistry::register_thread(const ThreadRecord& record) {
  check_record(record);
  std::unique_lock lock(mutex_);

  auto it = threads_.find(record.root_tid);
  if (it != threads_.end()) {
    if (it->second.alive) {
      throw GenealogyError("duplicate live root_tid " +
                           std::to_string(record.root_tid));
    }
    // Pid reuse: drop the dead retained record before inserting anew.
    if (it->second.record.parent_root_tid) {
      auto parent = threads_.find(*it->second.record.parent_root_tid);
      if (parent != threads_.end() && parent->second.child_count > 0) {
        --parent->second.child_count;
      }
    }
    threads_.erase(it);
  }

  for (const NamespaceTid& id : record.ns_ids) {
    auto found = by_namespace_.find({id.ns, id.local_tid});
    if (found != by_namespace_.end()) {
      auto holder = threads_.find(found->second);
      if (holder != threads_.end() && holder->second.alive) {
        throw GenealogyError("live namespace identity collision");
      }
    }
  }

  // The parent chain must not reach back to the tid being registered; a
  // reused tid whose old lineage now descends from it would otherwise make
  // ancestor walks loop.
  ThreadRecord stored = record;
  if (stored.parent_root_tid) {
    auto parent = threads_.find(*stored.parent_root_tid);
    if (parent == threads_.end()) {
      stored.parent_root_tid.reset();
      ++counters_.unknown_parents;
    } else {
      std::optional<ThreadId> cursor = stored.parent_root_tid;
      std::size_t steps = 0;
      while (cursor && steps++ <= threads_.size()) {
        if (*cursor == stored.root_tid) {
          throw GenealogyError("parent chain would form a cycle");
        }
        auto link = threads_.find(*cursor);
        cursor = (link == threads_.end()) ? std::nullopt
                                          : link->second.record.parent_root_tid;
      }
      ++parent->second.child_count;
    }
  }

  for (const NamespaceTid& id : stored.ns_ids) {
    by_namespace_[{id.ns, id.local_tid}] = stored.root_tid;
  }
  threads_.emplace(stored.root_tid, Entry{std::move(stored), true, 0});
}

std::optional<ThreadId> ThreadRegistry::resolve(NamespaceId ns,
                                                std::uint64_t local_tid) const {
  std::shared_lock lock(mutex_);
  auto it = by_namespace_.find({ns, local_tid});
  if (it == by_namespace_.end()) return std::nullopt;
  auto entry = threads_.find(it->second);
  if (entry == threads_.end() || !entry->second.alive) return std::nullopt;
  return it->second;
}

std::optional<ThreadId> ThreadRegistry::parent_of(ThreadId root_tid) const {
  std::shared_lock lock(mutex_);
  auto it = threads_.find(root_tid);
  if (it == threads_.end()) return std::nullopt;
  return it->second.record.parent_root_tid;
}

void ThreadRegistry::mark_exit(ThreadId root_tid) {
  std::unique_lock lock(mutex_);
  auto it = threads_.find(root_tid);
  if (it == threads_.end() || !it->second.alive) {
    ++counters_.unknown_exits;
    return;
  }
  it->second.alive = false;
  for (const NamespaceTid& id : it->second.record.ns_ids) {
    auto found = by_namespace_.find({id.ns, id.local_tid});
    if (found != by_namespace_.end() && found->second == root_tid) {
      by_namespace_.erase(found);
    }
  }
}

void ThreadRegistry::collect(ThreadId root_tid) {
  std::unique_lock lock(mutex_);
  std::optional<ThreadId> cursor = root_tid;
  while (cursor) {
    auto it = threads_.find(*cursor);
    if (it == threads_.end() || it->second.alive || it->second.child_count > 0) {
      return;
    }
    std::optional<ThreadId> parent = it->second.record.parent_root_tid;
    threads_.erase(it);
    if (parent) {
      auto parent_it = threads_.find(*parent);
      if (parent_it != threads_.end() && parent_it->second.child_count > 0) {
        --parent_it->second.child_count;
      }
    }
    cursor = parent;
  }
}

bool ThreadRegistry::contains(ThreadId root_tid) const {
  std::shared_lock lock(mutex_);
  return threads_.contains(root_tid);
}

bool ThreadRegistry::is_alive(ThreadId root_tid) const {
  std::shared_lock lock(mutex_);
  auto it = threads_.find(root_tid);
  return it != threads_.end() && it->second.alive;
}

std::size_t ThreadRegistry::size() const {
  std::shared_lock lock(mutex_);
  return threads_.size();
}

ThreadRegistry::Counters ThreadRegistry::counters() const {
  std::shared_lock lock(mutex_);
  return counters_;
}

}  // namespace nahida
