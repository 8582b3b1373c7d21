#pragma once

#include "spk/error.hpp"

#include <gtest/gtest.h>

#define EXPECT_SPK_ERROR(statement, expected_code)                                            \
    do {                                                                                      \
        bool spk_thrown_ = false;                                                             \
        try {                                                                                 \
            (void)(statement);                                                                \
        } catch (const ::spk::Error& e) {                                                     \
            spk_thrown_ = true;                                                               \
            EXPECT_EQ(e.code(), (expected_code)) << e.what();                                 \
        }                                                                                     \
        EXPECT_TRUE(spk_thrown_) << "expected spk::Error " << ::spk::to_string(expected_code); \
    } while (false)
