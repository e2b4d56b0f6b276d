#include "srlx/model.hpp"

namespace srlx {

Model::Model(ModelVocabs v, const ModelConfig& c, uint64_t seed)
    : cfg_(c),
      vocabs_(std::move(v)),
      store_(),
      init_rng_(Rng::derive(seed, {0x1217})),
      decoder_(store_, vocabs_, c.decoder(), init_rng_),
      encoder_(store_, vocabs_, c.encoder(), init_rng_) {}

std::vector<std::string> Model::predict_roles(
    const AnnotatedSentence& sentence, const PredicateInstance& instance) const {
  nn::Graph g;
  auto posteriors = encoder_.label_roles(g, sentence, instance);
  std::vector<std::string> out;
  out.reserve(posteriors.size());
  for (auto p : posteriors) {
    const nn::Mat& pi = g.value(p);
    int best = 0;
    for (int r = 1; r < pi.rows(); ++r)
      if (pi(r, 0) > pi(best, 0)) best = r;
    out.push_back(vocabs_.roles.label(best));
  }
  return out;
}

}  // namespace srlx
