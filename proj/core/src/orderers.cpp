#include "orderbench/orderers.hpp"

#include "orderbench/error.hpp"
#include "orderbench/random.hpp"

namespace orderbench {

std::vector<Outcome> Orderer::order_batch(std::span<const ShuffledInstance> instances) const
{
    std::vector<Outcome> out;
    out.reserve(instances.size());
    for (const auto& instance : instances) {
        try {
            out.push_back(Outcome::ok(order(instance)));
        } catch (const Error& e) {
            out.push_back(Outcome::failed(e.what()));
        }
    }
    return out;
}

Prediction IdentityOrderer::order(const ShuffledInstance& instance) const
{
    return {Permutation::identity(instance.size()), false};
}

Prediction RandomOrderer::order(const ShuffledInstance& instance) const
{
    return {sample_shuffle(instance.size(), derive_seed(seed_, instance.id, "random-orderer")), false};
}

Prediction GoldOrderer::order(const ShuffledInstance& instance) const
{
    return {instance.gold, false};
}

} // namespace orderbench
