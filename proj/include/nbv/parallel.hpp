#pragma once

#include <exception>
#include <mutex>

namespace nbv {

/// Carries the first exception thrown inside an OpenMP loop body out of the
/// parallel region (exceptions must not cross it).
class ExceptionSlot {
public:
    template <typename F>
    void run(F&& body) noexcept {
        try {
            body();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

}  // namespace nbv
