// Types one phrase with a simulated user on each keyboard variant and prints
// the resulting metrics.

#include <cstdio>
#include <memory>

#include "eyetype/phrase_set.hpp"
#include "eyetype/simharness.hpp"

int main() {
  using namespace eyetype;
  const auto model = cached_model(phrase_corpus());
  const UserModel user = UserModel{}.for_session(3, 250.0);
  const std::string phrase = "the quick brown fox";

  for (auto variant : {Variant::NoP, Variant::LP, Variant::LWP}) {
    const auto layout = std::make_shared<const InterfaceLayout>(build_layout(variant, Revision::Exp1));
    const auto r = run_trial(phrase, layout, model, user, 2024);
    const auto& m = r.row.metrics;
    std::printf("%-5s \"%s\"  %zu samples  wpm %.2f  adj_wpm %.2f  uer %.3f  cer %.3f  ks %.3f\n",
                to_string(variant).c_str(), r.row.record.transcribed.c_str(), r.trace.size(), m.wpm, m.adj_wpm,
                m.uer, m.cer, m.ks);
  }
}
