// Minimal software stand-in for the Vitis `hls::stream` class, enough to
// compile and run generated kernels with a host C++ compiler. Tasks called in
// schedule order never read an empty stream, so an unbounded deque suffices.
#pragma once

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <deque>

namespace hls {

template <typename T>
class stream {
public:
    stream() {}
    explicit stream(const char*) {}

    void write(const T& v) { q_.push_back(v); }

    T read() {
        if (q_.empty()) {
            std::fprintf(stderr, "hls::stream: read from empty stream\n");
            std::abort();
        }
        T v = q_.front();
        q_.pop_front();
        return v;
    }

    bool empty() const { return q_.empty(); }
    bool full() const { return false; }
    std::size_t size() const { return q_.size(); }

    void operator<<(const T& v) { write(v); }
    void operator>>(T& v) { v = read(); }

private:
    std::deque<T> q_;
};

}  // namespace hls
