#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "alm/data.hpp"
#include "alm/rng.hpp"

namespace alm {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_real_estate_surrogate(std::ostream& out, std::uint64_t seed, std::size_t rows) {
  Rng rng = make_rng(seed, "surrogate-real-estate");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> age_shape(1.6, 1.0);
  std::gamma_distribution<double> age_rest(2.4, 1.0);

  out << "No,X1 transaction date,X2 house age,X3 distance to the nearest MRT station,"
         "X4 number of convenience stores,X5 latitude,X6 longitude,Y house price of unit area\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const double date = 2012.667 + static_cast<double>(uniform_index(rng, 12)) / 12.0;
    const double a = age_shape(rng);
    const double age = std::round(43.8 * a / (a + age_rest(rng)) * 10.0) / 10.0;
    const double dist = std::clamp(std::exp(std::log(500.0) + 1.05 * normal(rng)), 23.38284, 6488.021);
    const double stores =
        std::clamp(std::round(10.5 - 1.9 * std::log(dist / 23.0) + 1.4 * normal(rng)), 0.0, 10.0);
    const double angle = 2.0 * std::numbers::pi * uniform01(rng);
    const double reach = 0.0045 * std::sqrt(dist / 100.0);
    const double lat = 24.969 + reach * std::sin(angle) + 0.002 * normal(rng);
    const double lon = 121.540 + reach * std::cos(angle) + 0.002 * normal(rng);
    double price = 38.0 - 6.5 * std::log(dist / 500.0) + 0.8 * (stores - 4.0) - 0.25 * (age - 17.7) +
                   5.0 * (date - 2013.1) + 6.0 * normal(rng);
    price = std::max(7.6, std::round(price * 10.0) / 10.0);
    out << (i + 1) << ',' << fixed(date, 3) << ',' << fixed(age, 1) << ',' << fixed(dist, 5) << ','
        << static_cast<int>(stores) << ',' << fixed(lat, 5) << ',' << fixed(lon, 5) << ','
        << fixed(price, 1) << '\n';
  }
}

void write_energy_surrogate(std::ostream& out, std::uint64_t seed, std::size_t hours) {
  using namespace std::chrono;
  Rng rng = make_rng(seed, "surrogate-energy");
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Building {
    double base, occupied, seasonal, weekend, phi, innovation;
    double noise = 0.0;
  };
  Building analyst{180.0, 120.0, 35.0, 0.45, 0.75, 14.0};
  Building seller{165.0, 105.0, 30.0, 0.5, 0.75, 14.0};

  const sys_days start = year{2016} / January / 1;
  out << "timestamp,Rachael,Madge\n";
  for (std::size_t h = 0; h < hours; ++h) {
    const auto stamp = sys_seconds{start} + std::chrono::hours{h};
    const auto day = floor<days>(stamp);
    const year_month_day ymd{day};
    const int hour = static_cast<int>(duration_cast<std::chrono::hours>(stamp - day).count());
    const unsigned wd = weekday{day}.c_encoding();
    const bool weekend = wd == 0 || wd == 6;
    const double doy = static_cast<double>((day - sys_days{ymd.year() / January / 1}).count());
    const double occupancy =
        std::clamp(std::sin(std::numbers::pi * (hour - 6.0) / 13.0), 0.0, 1.0);  // 06:00-19:00 bump
    const double season = std::cos(2.0 * std::numbers::pi * (doy - 200.0) / 365.25);

    auto reading = [&](Building& b) {
      b.noise = b.phi * b.noise + b.innovation * normal(rng);
      const double profile = b.occupied * occupancy * (weekend ? b.weekend : 1.0);
      return std::max(0.0, b.base + profile + b.seasonal * season + b.noise);
    };
    const double a = reading(analyst);
    const double s = reading(seller);
    // Sparse meter dropouts on the seller side.
    const bool gap = h % 4391 == 4000;

    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour);
    out << buf << ',' << fixed(a, 3) << ',' << (gap ? std::string() : fixed(s, 3)) << '\n';
  }
}

}  // namespace alm
