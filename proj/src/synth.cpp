#include "wgpnn/synth.hpp"

#include <numeric>
#include <ostream>
#include <random>

#include "wgpnn/error.hpp"

namespace wgpnn {

void SynthSpec::validate() const {
  if (entities < 2 || predicates < 1) throw Error(ErrorCategory::kConfig, "synth: need >= 2 entities and >= 1 predicate");
  if (period < 2) throw Error(ErrorCategory::kConfig, "synth: period must be >= 2");
  if (horizon < 3 * period) throw Error(ErrorCategory::kConfig, "synth: horizon must be >= 3 * period");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorCategory::kConfig, "synth: noise must lie in [0, 1]");
  if (time_unit <= 0) throw Error(ErrorCategory::kConfig, "synth: time unit must be positive");
}

SyntheticGenerator::SyntheticGenerator(const SynthSpec& spec) : spec_(spec) {
  spec_.validate();
  std::mt19937_64 rng(spec_.seed);
  std::vector<std::uint32_t> coprime;
  for (std::uint32_t k = 1; k < spec_.entities; ++k) {
    if (std::gcd(k, spec_.entities) == 1) coprime.push_back(k);
  }
  for (std::uint32_t p = 0; p < spec_.predicates; ++p) {
    offsets_.push_back(std::uniform_int_distribution<std::uint32_t>(1, spec_.entities - 1)(rng));
    steps_.push_back(coprime[std::uniform_int_distribution<std::size_t>(0, coprime.size() - 1)(rng)]);
  }
}

EntityId SyntheticGenerator::object_at(EntityId subject, PredicateId predicate, std::uint32_t step) const {
  const std::uint64_t phase = step % spec_.period;
  return static_cast<EntityId>((subject + offsets_.at(predicate) + phase * steps_.at(predicate)) % spec_.entities);
}

void SyntheticGenerator::write_tsv(std::ostream& out) const {
  std::mt19937_64 rng(spec_.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> entity(0, spec_.entities - 1);
  std::uniform_int_distribution<std::uint32_t> predicate(0, spec_.predicates - 1);
  out << "# synthetic periodic tKG: entities=" << spec_.entities << " predicates=" << spec_.predicates
      << " period=" << spec_.period << " horizon=" << spec_.horizon << " noise=" << spec_.noise
      << " seed=" << spec_.seed << '\n';
  for (std::uint32_t step = 0; step < spec_.horizon; ++step) {
    const Timestamp time = static_cast<Timestamp>(step) * spec_.time_unit;
    for (EntityId s = 0; s < spec_.entities; ++s) {
      for (PredicateId p = 0; p < spec_.predicates; ++p) {
        if (spec_.noise > 0.0 && coin(rng) < spec_.noise) {
          const auto ns = entity(rng);
          const auto np = predicate(rng);
          const auto no = entity(rng);
          out << 'e' << ns << "\tp" << np << "\te" << no << '\t' << time << "\tnoise\n";
        } else {
          out << 'e' << s << "\tp" << p << "\te" << object_at(s, p, step) << '\t' << time << "\tsignal\n";
        }
      }
    }
  }
}

}  // namespace wgpnn
