#pragma once

// Unit conventions used across the library.
//
//   network data   MW, $/MWh
//   insurance      kW, cents/kWh, cents
//   penalty rho    $/kW accrued per hour of demand, converted to cents/kW
namespace evinsure::units {

double usd_per_mwh_to_cents_per_kwh(double usd_per_mwh);
double cents_per_kwh_to_usd_per_mwh(double cents_per_kwh);
double kw_to_mw(double kw);
double mw_to_kw(double mw);
double usd_to_cents(double usd);
double cents_to_usd(double cents);

}  // namespace evinsure::units
