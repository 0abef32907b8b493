#pragma once

#include <deque>

#include "vwm/core/types.hpp"

namespace vwm {

/// Bounded window over the most recent frames of the generation stream.
/// Frame indices must arrive contiguously; the window is oldest-first.
class WorkingMemory {
public:
    explicit WorkingMemory(std::size_t capacity = 5);

    /// Appends the frame and drops the oldest beyond capacity. Throws if the
    /// index does not continue the stream.
    void push(const Frame& frame);

    const std::deque<Frame>& window() const { return window_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return window_.empty(); }

private:
    std::size_t capacity_ = 5;
    std::deque<Frame> window_;
};

}  // namespace vwm
