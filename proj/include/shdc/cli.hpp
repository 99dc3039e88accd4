#pragma once

// Single-binary command-line front end. Subcommands:
//
//   gen-im   generate and serialize a seeded item memory
//   synth    generate a synthetic annotated recording
//   train    one-shot training of an associative memory from one seizure
//   infer    run inference and write a detection report (JSON + CSV)
//   sweep    temporal-threshold sweep across recordings
//   cost     switching-activity + area comparison across variants
//
// Options come from an optional JSON experiment config (--config) with CLI
// flags taking precedence. Exit codes: 0 success, 2 usage/argument error,
// 3 data error (missing or malformed files).

#include <string>
#include <vector>

namespace shdc {

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace shdc
