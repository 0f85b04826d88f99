#pragma once

#include <string>
#include <vector>

#include "pulselab/substrate.hpp"

namespace pulselab {

// Immutable set of substrates ordered by family_index.
class Registry {
public:
    Registry() = default;
    explicit Registry(std::vector<SubstrateSpec> entries);

    const std::vector<SubstrateSpec>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const SubstrateSpec& find(const std::string& name) const;
    bool contains(const std::string& name) const noexcept;
    std::vector<std::string> names() const;

private:
    std::vector<SubstrateSpec> entries_;
};

// Frozen calibrated registry of the nine compounds.
Registry default_registry();

}  // namespace pulselab
