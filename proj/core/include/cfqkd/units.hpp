#pragma once

namespace cfqkd {

/// 10^(-loss_db/10). Rejects negative or non-finite losses.
double transmission_from_db(double loss_db);

/// -10 log10(transmission) for transmission in (0, 1].
double db_from_transmission(double transmission);

}  // namespace cfqkd
