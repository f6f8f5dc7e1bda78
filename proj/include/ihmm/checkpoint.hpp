#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ihmm/model.hpp"
#include "ihmm/random.hpp"

namespace ihmm {

inline constexpr std::string_view kChainSchema = "ihmm-chain/1";

// JSON text of a chain, optionally with the generator state so a run can be
// resumed bit-exactly.
std::string chain_to_json(const ChainState& chain, const Rng* rng = nullptr);

struct LoadedChain {
  ChainState chain;
  std::optional<Rng> rng;
};

// Throws DataError on malformed input or a schema mismatch.
LoadedChain chain_from_json(std::string_view text);

void save_checkpoint(const std::string& path, const ChainState& chain, const Rng* rng = nullptr);
LoadedChain load_checkpoint(const std::string& path);

}  // namespace ihmm
