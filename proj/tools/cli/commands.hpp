#pragma once

#include <filesystem>
#include <functional>

#include "config.hpp"
#include "report.hpp"

namespace arstat::cli {

Report cmd_verify(const RunConfig& cfg, const std::filesystem::path& out);
Report cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out);
Report cmd_husimi(const RunConfig& cfg, const std::filesystem::path& out);
Report cmd_star_convergence(const RunConfig& cfg, const std::filesystem::path& out);
Report cmd_edge_sim(const RunConfig& cfg, const std::filesystem::path& out);

/// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

/// Parses argv, runs the command and writes report.json. Returns the exit
/// code: 0 all checks pass, 1 a check failed or a computation raised, 2 a
/// configuration error.
int run(int argc, char** argv);

}  // namespace arstat::cli
