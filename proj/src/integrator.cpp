#include "medgate/integrator.hpp"

namespace medgate {

Op16 propagate_magnus(const Op16& h0, const Op16& v, const Envelope& f, double t0, double t1,
                      const IntegrationOptions& opts, const Op16& initial,
                      IntegrationStats* stats) {
  return propagate_magnus_n<16>(h0, v, f, t0, t1, opts, initial, stats);
}

}  // namespace medgate
