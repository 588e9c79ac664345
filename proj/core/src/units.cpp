#include "evinsure/units.hpp"

namespace evinsure::units {

// 1 $/MWh = 100 cents / 1000 kWh.
double usd_per_mwh_to_cents_per_kwh(double usd_per_mwh) { return usd_per_mwh / 10.0; }
double cents_per_kwh_to_usd_per_mwh(double cents_per_kwh) { return cents_per_kwh * 10.0; }
double kw_to_mw(double kw) { return kw / 1000.0; }
double mw_to_kw(double mw) { return mw * 1000.0; }
double usd_to_cents(double usd) { return usd * 100.0; }
double cents_to_usd(double cents) { return cents / 100.0; }

}  // namespace evinsure::units
