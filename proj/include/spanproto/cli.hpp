// Command-line pipeline: data generation, training, evaluation, inspection,
// and seed/grid sweeps. run() is the whole CLI behind a testable interface.
#pragma once

#include <string>
#include <vector>

namespace spanproto::cli {

int run(const std::vector<std::string>& args);

}  // namespace spanproto::cli
