#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "uqp/error.hpp"

namespace uqp::test {

inline std::string read_kernel(const std::string& name) {
    std::ifstream in(std::string(UQP_KERNEL_DIR) + "/" + name, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing kernel file " << name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs `fn`, requiring it to throw uqp::Error with `code`; returns the error.
template <class Fn>
Error expect_error(ErrorCode code, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        CHECK_MESSAGE(e.code() == code, "expected " << to_string(code) << ", got " << e.describe());
        return e;
    }
    FAIL("expected " << to_string(code) << " but nothing was thrown");
    return Error(code, "unreachable");
}

}  // namespace uqp::test
