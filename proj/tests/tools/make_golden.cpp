// Writes the grid-oracle optimum of a market spec as a golden JSON document:
//   make_golden <spec> <x> > golden.json
#include <cstdlib>
#include <iostream>

#include "oracles.hpp"
#include "tcrobust/io.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: make_golden <spec> <x>\n";
    return 2;
  }
  const auto fam = tcr::load_market_spec(argv[1]);
  const double x = std::atof(argv[2]);
  const double lp = fam.lambda_prime().value_or(fam.lambda() / 2);
  const tcr::testing::GridOptions opt{41, 16, 0.2};
  const auto g = tcr::testing::grid_oracle(fam, tcr::Utility::log(), x, lp, opt);
  tcr::Json doc;
  doc["utility"] = "log";
  doc["x"] = x;
  doc["lambda_prime"] = lp;
  doc["method"] = "exhaustive grid over net trades per slot, 41 points per axis, 16 levels shrinking by 0.2";
  doc["evaluations"] = g.evaluations;
  doc["value"] = g.value;
  doc["net_trades"] = g.net;
  std::cout << doc.dump(2) << "\n";
  return 0;
}
