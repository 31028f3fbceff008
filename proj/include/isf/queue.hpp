#pragma once

#include <cstdint>
#include <deque>
#include <queue>
#include <stdexcept>
#include <vector>

#include "isf/lattice.hpp"

namespace isf {

// Priority queues for ordered propagation. All three order extractions by
// (cost, stamp): every insert or cost update takes a fresh monotonically
// increasing stamp, so equal costs leave in the order their current cost was
// set. The three implementations are interchangeable and must produce
// identical extraction sequences.

// Binary heap with a site->slot index, true decrease-key via sift-up.
class HeapQueue {
public:
    explicit HeapQueue(SiteIndex n)
        : slot_(std::size_t(n), -1), cost_(std::size_t(n), 0.0),
          stamp_(std::size_t(n), 0) {}

    bool empty() const { return heap_.empty(); }

    void push(SiteIndex s, double cost) {
        cost_[s] = cost;
        stamp_[s] = next_stamp_++;
        slot_[s] = std::int32_t(heap_.size());
        heap_.push_back(s);
        sift_up(heap_.size() - 1);
    }

    // Lower the key of a queued site; takes a fresh stamp.
    void update(SiteIndex s, double cost) {
        cost_[s] = cost;
        stamp_[s] = next_stamp_++;
        sift_up(std::size_t(slot_[s]));
    }

    SiteIndex pop() {
        const SiteIndex top = heap_.front();
        slot_[top] = -1;
        heap_.front() = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            slot_[heap_.front()] = 0;
            sift_down(0);
        }
        return top;
    }

private:
    bool before(SiteIndex a, SiteIndex b) const {
        const double ca = cost_[a], cb = cost_[b];
        if (ca != cb) return ca < cb;
        return stamp_[a] < stamp_[b];
    }
    void sift_up(std::size_t i) {
        while (i > 0) {
            const std::size_t parent = (i - 1) / 2;
            if (!before(heap_[i], heap_[parent])) break;
            swap_slots(i, parent);
            i = parent;
        }
    }
    void sift_down(std::size_t i) {
        while (true) {
            std::size_t best = i;
            const std::size_t l = 2 * i + 1, r = 2 * i + 2;
            if (l < heap_.size() && before(heap_[l], heap_[best])) best = l;
            if (r < heap_.size() && before(heap_[r], heap_[best])) best = r;
            if (best == i) break;
            swap_slots(i, best);
            i = best;
        }
    }
    void swap_slots(std::size_t i, std::size_t j) {
        std::swap(heap_[i], heap_[j]);
        slot_[heap_[i]] = std::int32_t(i);
        slot_[heap_[j]] = std::int32_t(j);
    }

    std::vector<SiteIndex> heap_;
    std::vector<std::int32_t> slot_;
    std::vector<double> cost_;
    std::vector<std::int64_t> stamp_;
    std::int64_t next_stamp_ = 0;
};

// std::priority_queue with lazy reinsertion; stale entries are skipped when
// their stamp no longer matches the site's latest.
class LazyHeapQueue {
public:
    explicit LazyHeapQueue(SiteIndex n) : live_stamp_(std::size_t(n), -1) {}

    bool empty() {
        drop_stale();
        return pq_.empty();
    }

    void push(SiteIndex s, double cost) {
        live_stamp_[s] = next_stamp_;
        pq_.push(Entry{cost, next_stamp_, s});
        ++next_stamp_;
    }

    void update(SiteIndex s, double cost) { push(s, cost); }

    SiteIndex pop() {
        drop_stale();
        const SiteIndex s = pq_.top().site;
        pq_.pop();
        live_stamp_[s] = -1;
        return s;
    }

private:
    struct Entry {
        double cost;
        std::int64_t stamp;
        SiteIndex site;
        bool operator>(const Entry& o) const {
            if (cost != o.cost) return cost > o.cost;
            return stamp > o.stamp;
        }
    };

    void drop_stale() {
        while (!pq_.empty() &&
               pq_.top().stamp != live_stamp_[pq_.top().site])
            pq_.pop();
    }

    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq_;
    std::vector<std::int64_t> live_stamp_;
    std::int64_t next_stamp_ = 0;
};

// Dial-style bucket queue for integer costs in [0, maxval]. Valid for
// non-decreasing cost functions: the scan pointer never moves backwards.
class BucketQueue {
public:
    BucketQueue(SiteIndex n, int maxval)
        : buckets_(std::size_t(maxval) + 1), live_stamp_(std::size_t(n), -1) {}

    bool empty() {
        advance();
        return size_ == 0;
    }

    void push(SiteIndex s, double cost) {
        const int c = int(cost);
        if (c < 0 || std::size_t(c) >= buckets_.size())
            throw std::invalid_argument("bucket queue: cost out of range");
        live_stamp_[s] = next_stamp_;
        buckets_[c].push_back(Entry{next_stamp_, s});
        ++next_stamp_;
        ++size_;
        if (c < current_) current_ = c;
    }

    void update(SiteIndex s, double cost) { push(s, cost); }

    SiteIndex pop() {
        advance();
        const Entry e = buckets_[current_].front();
        buckets_[current_].pop_front();
        --size_;
        live_stamp_[e.site] = -1;
        return e.site;
    }

private:
    struct Entry {
        std::int64_t stamp;
        SiteIndex site;
    };

    void advance() {
        while (std::size_t(current_) < buckets_.size()) {
            auto& b = buckets_[current_];
            while (!b.empty() &&
                   b.front().stamp != live_stamp_[b.front().site]) {
                b.pop_front();
                --size_;
            }
            if (!b.empty()) return;
            ++current_;
        }
    }

    std::vector<std::deque<Entry>> buckets_;
    std::vector<std::int64_t> live_stamp_;
    std::int64_t next_stamp_ = 0;
    std::int64_t size_ = 0;
    int current_ = 0;
};

}  // namespace isf
