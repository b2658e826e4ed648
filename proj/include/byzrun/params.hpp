#pragma once

#include <vector>

#include "byzrun/haps.hpp"

namespace byzrun {

// The finite desk-scale universe a scenario works over.
struct ModelParams {
  int agents = 2;
  std::vector<Message> messages;
  int max_copies = 1;  // send copy numbers range over [0, max_copies)
  Timestamp horizon = 3;

  std::vector<AgentId> agent_ids() const {
    std::vector<AgentId> out;
    for (AgentId i = 1; i <= agents; ++i) out.push_back(i);
    return out;
  }

  // Local actions available to agent i.
  std::vector<LocalAction> action_alphabet(AgentId i) const;
  // Local haps recordable by agent i (actions plus receive events).
  std::vector<LocalHap> local_hap_alphabet(AgentId i) const;
};

}  // namespace byzrun
