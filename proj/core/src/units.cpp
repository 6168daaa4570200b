#include "cfqkd/units.hpp"

#include <cmath>

#include "cfqkd/errors.hpp"

namespace cfqkd {

double transmission_from_db(double loss_db) {
  if (!std::isfinite(loss_db) || loss_db < 0.0) throw ValidationError("loss_db", "must be finite and >= 0");
  return std::pow(10.0, -loss_db / 10.0);
}

double db_from_transmission(double transmission) {
  if (!(transmission > 0.0 && transmission <= 1.0))
    throw ValidationError("transmission", "must lie in (0, 1]");
  return -10.0 * std::log10(transmission);
}

}  // namespace cfqkd
