#pragma once

// `pulselab` command-line front end. Every successful run writes one
// manifest.json next to its artifacts in the output directory.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pulselab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kAcceptanceFailed = 2 };

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::string config_digest;
    std::map<std::string, std::uint64_t> seeds;
    std::vector<std::string> artifacts;  // file names relative to the output directory
    std::string version;
    double duration_s = 0.0;
};

std::string manifest_json(const RunManifest& m);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pulselab::cli
