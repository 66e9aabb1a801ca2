#pragma once

#include "delaynet/network.hpp"

#include <string>

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(DELAYNET_NETWORKS_DIR) + "/" + name; }

inline delaynet::DelayedNetwork net(const std::string& name) { return delaynet::load_network(path(name + ".net")); }

inline delaynet::ConjugacyWitness witness(const std::string& name, const delaynet::DelayedNetwork& source) {
  return delaynet::load_witness(path(name + ".witness"), source);
}

inline delaynet::Rational q(const char* text) { return delaynet::parse_rational(text); }

}  // namespace fixtures
