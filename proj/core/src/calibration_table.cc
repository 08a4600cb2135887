// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/scenegen.h"

namespace polyscene::scenegen {

namespace {

// polyscene calibrate --samples 1000 --seed 1 --format cpp
constexpr CalibrationEntry kTable[] = {
    {Layout::kSeparate, 1, 8, 0.150, 0.308},
    {Layout::kSeparate, 2, 14, 0.030, 0.201},
    {Layout::kSeparate, 3, 20, 0.010, 0.173},
    {Layout::kSeparate, 4, 20, 0.015, 0.131},
    {Layout::kSeparate, 5, 24, 0.010, 0.123},
    {Layout::kSeparate, 6, 32, 0.005, 0.116},
    {Layout::kSeparate, 8, 32, 0.005, 0.075},
    {Layout::kSeparate, 10, 32, 0.005, 0.032},
    {Layout::kSeparate, 12, 40, 0.005, 0.042},
    {Layout::kSeparate, 15, 40, 0.005, 0.034},
    {Layout::kSeparate, 18, 40, 0.005, 0.025},
    {Layout::kTouching, 1, 8, 0.150, 0.308},
    {Layout::kTouching, 2, 8, 0.300, 0.134},
    {Layout::kTouching, 3, 8, 0.600, 0.131},
    {Layout::kTouching, 4, 8, 0.600, 0.108},
    {Layout::kTouching, 5, 10, 0.200, 0.115},
    {Layout::kTouching, 6, 10, 0.300, 0.091},
    {Layout::kTouching, 8, 12, 0.200, 0.093},
    {Layout::kTouching, 10, 12, 0.200, 0.075},
    {Layout::kTouching, 12, 14, 0.150, 0.067},
    {Layout::kTouching, 15, 16, 0.100, 0.064},
    {Layout::kTouching, 18, 16, 0.150, 0.064},
    {Layout::kIntersecting, 1, 8, 0.900, 0.163},
    {Layout::kIntersecting, 2, 8, 0.900, 0.211},
    {Layout::kIntersecting, 3, 8, 0.900, 0.137},
    {Layout::kIntersecting, 4, 10, 0.400, 0.137},
    {Layout::kIntersecting, 5, 10, 0.400, 0.111},
    {Layout::kIntersecting, 6, 12, 0.300, 0.110},
    {Layout::kIntersecting, 8, 12, 0.300, 0.089},
    {Layout::kIntersecting, 10, 14, 0.200, 0.079},
    {Layout::kIntersecting, 12, 16, 0.150, 0.088},
    {Layout::kIntersecting, 15, 16, 0.200, 0.065},
    {Layout::kIntersecting, 18, 18, 0.100, 0.066},
};

}  // namespace

std::span<const CalibrationEntry> builtin_calibration() { return kTable; }

}  // namespace polyscene::scenegen
