#include "tcrobust/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tcrobust/errors.hpp"

namespace tcr {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SpecError(path, std::string("invalid JSON: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

const Json& require(const Json& obj, const std::string& key, const std::string& field) {
  if (!obj.is_object()) throw SpecError(field, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(field.empty() ? key : field + "." + key, "missing");
  return *it;
}

std::string join(const std::string& field, const std::string& key) {
  return field.empty() ? key : field + "." + key;
}

std::string at_index(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

double number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw SpecError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SpecError(field, "expected a finite number");
  return d;
}

std::vector<double> numbers(const Json& v, const std::string& field) {
  if (!v.is_array()) throw SpecError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], at_index(field, i)));
  return out;
}

std::string text(const Json& v, const std::string& field) {
  if (!v.is_string()) throw SpecError(field, "expected a string");
  return v.get<std::string>();
}

Partition partition(const Json& v, const std::string& field,
                    const std::vector<std::string>& labels) {
  if (!v.is_array()) throw SpecError(field, "expected an array of label lists");
  Partition out;
  std::set<std::size_t> seen;
  for (std::size_t c = 0; c < v.size(); ++c) {
    const std::string cf = at_index(field, c);
    if (!v[c].is_array() || v[c].empty()) throw SpecError(cf, "expected a nonempty list of labels");
    std::vector<std::size_t> cell;
    for (std::size_t j = 0; j < v[c].size(); ++j) {
      const std::string label = text(v[c][j], at_index(cf, j));
      auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) throw SpecError(at_index(cf, j), "unknown scenario '" + label + "'");
      const auto w = static_cast<std::size_t>(it - labels.begin());
      if (!seen.insert(w).second) throw SpecError(at_index(cf, j), "scenario '" + label + "' listed twice");
      cell.push_back(w);
    }
    out.push_back(std::move(cell));
  }
  if (seen.size() != labels.size()) throw SpecError(field, "cells do not cover every scenario");
  return out;
}

Json partition_json(const Partition& p, const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (const auto& cell : p) {
    Json c = Json::array();
    for (std::size_t w : cell) c.push_back(labels[w]);
    out.push_back(std::move(c));
  }
  return out;
}

LadlagPath path_from_json(const Json& v, const std::string& field, double horizon) {
  if (!v.is_object()) throw SpecError(field, "expected a path object");
  const double initial = number(require(v, "initial", field), join(field, "initial"));
  const double right0 =
      v.contains("initial_right_jump") ? number(v["initial_right_jump"], join(field, "initial_right_jump")) : 0.0;
  std::vector<PathEvent> events;
  if (v.contains("events")) {
    const auto& ev = v["events"];
    const std::string ef = join(field, "events");
    if (!ev.is_array()) throw SpecError(ef, "expected an array");
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string f = at_index(ef, i);
      PathEvent e;
      e.time = number(require(ev[i], "time", f), join(f, "time"));
      e.left_jump = ev[i].contains("left_jump") ? number(ev[i]["left_jump"], join(f, "left_jump")) : 0.0;
      e.right_jump = ev[i].contains("right_jump") ? number(ev[i]["right_jump"], join(f, "right_jump")) : 0.0;
      events.push_back(e);
    }
  }
  std::vector<double> slopes(events.size() + 1, 0.0);
  if (v.contains("slopes")) slopes = numbers(v["slopes"], join(field, "slopes"));
  try {
    return LadlagPath(horizon, initial, right0, std::move(events), std::move(slopes));
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

Json path_to_json(const LadlagPath& p) {
  Json out;
  out["initial"] = p.initial_value();
  if (p.initial_right_jump() != 0.0) out["initial_right_jump"] = p.initial_right_jump();
  Json ev = Json::array();
  for (const auto& e : p.events()) {
    Json j;
    j["time"] = e.time;
    j["left_jump"] = e.left_jump;
    j["right_jump"] = e.right_jump;
    ev.push_back(std::move(j));
  }
  out["events"] = std::move(ev);
  out["slopes"] = p.slopes();
  return out;
}

}  // namespace

ModelFamily parse_market_spec(const Json& doc) {
  if (!doc.is_object()) throw SpecError("<root>", "expected an object");
  const double horizon = number(require(doc, "horizon", ""), "horizon");
  if (!(horizon > 0.0)) throw SpecError("horizon", "must be positive");

  const auto& sc = require(doc, "scenarios", "");
  const auto& lab = require(sc, "labels", "scenarios");
  if (!lab.is_array() || lab.empty()) throw SpecError("scenarios.labels", "expected a nonempty array");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    labels.push_back(text(lab[i], at_index("scenarios.labels", i)));
    if (std::count(labels.begin(), labels.end(), labels.back()) > 1) {
      throw SpecError(at_index("scenarios.labels", i), "duplicate label");
    }
  }
  const auto probs = numbers(require(sc, "probabilities", "scenarios"), "scenarios.probabilities");
  if (probs.size() != labels.size()) {
    throw SpecError("scenarios.probabilities", "expected one probability per scenario label");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) throw SpecError(at_index("scenarios.probabilities", i), "must be positive");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "probabilities sum to " << sum << ", expected 1";
    throw SpecError("scenarios.probabilities", msg.str());
  }

  Partition root;
  if (doc.contains("root_partition")) {
    root = partition(doc["root_partition"], "root_partition", labels);
  } else {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    root.push_back(std::move(all));
  }

  std::vector<TreeEvent> events;
  if (doc.contains("events")) {
    const auto& ev = doc["events"];
    if (!ev.is_array()) throw SpecError("events", "expected an array");
    double prev = 0.0;
    const Partition* prev_part = &root;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string f = at_index("events", i);
      TreeEvent e;
      e.time = number(require(ev[i], "time", f), join(f, "time"));
      if (!(e.time > prev) || e.time > horizon) {
        throw SpecError(join(f, "time"), "event times must increase strictly within (0, horizon]");
      }
      e.pre = partition(require(ev[i], "pre", f), join(f, "pre"), labels);
      e.post = partition(require(ev[i], "post", f), join(f, "post"), labels);
      if (!refines(e.pre, *prev_part, labels.size())) {
        throw SpecError(join(f, "pre"), "must refine the partition in force before the event");
      }
      if (!refines(e.post, e.pre, labels.size())) {
        throw SpecError(join(f, "post"), "must refine the pre-event partition");
      }
      prev = e.time;
      events.push_back(std::move(e));
      prev_part = &events.back().post;
    }
  }
  ScenarioTree tree(labels, probs, horizon, root, events);

  const auto& models_doc = require(doc, "models", "");
  if (!models_doc.is_object() || models_doc.empty()) {
    throw SpecError("models", "expected a nonempty object keyed by model label");
  }
  std::vector<PriceModel> models;
  for (const auto& [name, m] : models_doc.items()) {
    const std::string mf = join("models", name);
    if (!m.is_object()) throw SpecError(mf, "expected an object keyed by scenario label");
    PriceModel pm;
    pm.label = name;
    for (const auto& l : labels) {
      pm.paths.push_back(path_from_json(require(m, l, mf), join(mf, l), horizon));
    }
    for (const auto& [key, unused] : m.items()) {
      (void)unused;
      if (std::find(labels.begin(), labels.end(), key) == labels.end()) {
        throw SpecError(join(mf, key), "unknown scenario");
      }
    }
    models.push_back(std::move(pm));
  }

  const double lambda = number(require(doc, "lambda", ""), "lambda");
  if (!(lambda > 0.0 && lambda < 1.0)) throw SpecError("lambda", "must lie in (0, 1)");
  std::optional<double> lambda_prime;
  if (doc.contains("lambda_prime") && !doc["lambda_prime"].is_null()) {
    lambda_prime = number(doc["lambda_prime"], "lambda_prime");
    if (!(*lambda_prime > 0.0 && *lambda_prime < lambda)) {
      throw SpecError("lambda_prime", "must lie in (0, lambda)");
    }
  }
  try {
    return ModelFamily(std::move(tree), std::move(models), lambda, lambda_prime);
  } catch (const ContractViolation& e) {
    throw SpecError("models", e.what());
  }
}

ModelFamily load_market_spec(const std::string& path) { return parse_market_spec(read_json_file(path)); }

Json market_spec_to_json(const ModelFamily& family) {
  const auto& tree = family.tree();
  const auto& labels = tree.labels();
  Json doc;
  doc["horizon"] = tree.horizon();
  doc["scenarios"]["labels"] = labels;
  doc["scenarios"]["probabilities"] = tree.probabilities();
  doc["root_partition"] = partition_json(tree.root(), labels);
  Json ev = Json::array();
  for (const auto& e : tree.events()) {
    Json j;
    j["time"] = e.time;
    j["pre"] = partition_json(e.pre, labels);
    j["post"] = partition_json(e.post, labels);
    ev.push_back(std::move(j));
  }
  doc["events"] = std::move(ev);
  Json models = Json::object();
  for (const auto& m : family.models()) {
    Json mj = Json::object();
    for (std::size_t w = 0; w < labels.size(); ++w) mj[labels[w]] = path_to_json(m.paths[w]);
    models[m.label] = std::move(mj);
  }
  doc["models"] = std::move(models);
  doc["lambda"] = family.lambda();
  if (family.lambda_prime()) doc["lambda_prime"] = *family.lambda_prime();
  return doc;
}

namespace {

const Partition& slot_partition(const ScenarioTree& tree, const TradeSlot& slot) {
  switch (slot.kind) {
    case SlotKind::Initial:
      return tree.root();
    case SlotKind::Left:
      return tree.events()[slot.index].pre;
    case SlotKind::Right:
      return tree.events()[slot.index].post;
    case SlotKind::Rate:
      return tree.layer(slot.index);
  }
  return tree.root();
}

}  // namespace

Json strategy_to_json(const Strategy& strategy, const ScenarioTree& tree) {
  Json doc;
  doc["x"] = strategy.x();
  doc["continuous_trading"] = strategy.layout().continuous_trading();
  Json slots = Json::array();
  const auto& L = strategy.layout();
  for (std::size_t i = 0; i < L.size(); ++i) {
    const auto& s = L.slot(i);
    Json j;
    j["kind"] = std::string(to_string(s.kind));
    j["index"] = s.index;
    j["time"] = s.time;
    Json cell = Json::array();
    for (std::size_t w : slot_partition(tree, s)[s.cell]) cell.push_back(tree.labels()[w]);
    j["scenarios"] = std::move(cell);
    j["buy"] = strategy.buy()[i];
    j["sell"] = strategy.sell()[i];
    slots.push_back(std::move(j));
  }
  doc["slots"] = std::move(slots);
  return doc;
}

Strategy strategy_from_json(const Json& doc, const ScenarioTree& tree) {
  const double x = number(require(doc, "x", "strategy"), "strategy.x");
  if (!(x > 0.0)) throw SpecError("strategy.x", "endowment must be positive");
  bool continuous = false;
  if (doc.contains("continuous_trading")) {
    if (!doc["continuous_trading"].is_boolean()) {
      throw SpecError("strategy.continuous_trading", "expected a boolean");
    }
    continuous = doc["continuous_trading"].get<bool>();
  }
  auto layout = std::make_shared<const StrategyLayout>(tree, continuous);
  const auto& slots = require(doc, "slots", "strategy");
  if (!slots.is_array() || slots.size() != layout->size()) {
    throw SpecError("strategy.slots", "expected " + std::to_string(layout->size()) +
                                          " slots for this market");
  }
  std::vector<double> buy(layout->size()), sell(layout->size());
  for (std::size_t i = 0; i < layout->size(); ++i) {
    const std::string f = at_index("strategy.slots", i);
    const auto& s = layout->slot(i);
    if (text(require(slots[i], "kind", f), join(f, "kind")) != to_string(s.kind) ||
        number(require(slots[i], "time", f), join(f, "time")) != s.time) {
      throw SpecError(f, "slot does not match the market's trading slots");
    }
    buy[i] = number(require(slots[i], "buy", f), join(f, "buy"));
    sell[i] = number(require(slots[i], "sell", f), join(f, "sell"));
    if (!(buy[i] >= 0.0) || !(sell[i] >= 0.0)) throw SpecError(f, "buy and sell must be nonnegative");
  }
  return Strategy(layout, x, std::move(buy), std::move(sell));
}

Json cps_to_json(const ConsistentPriceSystem& cps, const ModelFamily& family) {
  const auto& tree = family.tree();
  Json doc;
  doc["model"] = family.models().at(cps.theta).label;
  doc["lambda"] = cps.lambda;
  Json layers = Json::array();
  for (std::size_t k = 0; k < tree.num_layers(); ++k) {
    Json layer;
    layer["time"] = k == 0 ? 0.0 : tree.events()[k - 1].time;
    Json cells = Json::array();
    const auto& part = tree.layer(k);
    for (std::size_t c = 0; c < part.size(); ++c) {
      Json cell;
      Json sc = Json::array();
      for (std::size_t w : part[c]) sc.push_back(tree.labels()[w]);
      cell["scenarios"] = std::move(sc);
      cell["z0"] = cps.z0[k][c];
      cell["z1"] = cps.z1[k][c];
      cell["shadow_price"] = cps.z0[k][c] > 0.0 ? Json(cps.z1[k][c] / cps.z0[k][c]) : Json(nullptr);
      cells.push_back(std::move(cell));
    }
    layer["cells"] = std::move(cells);
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

ConsistentPriceSystem cps_from_json(const Json& doc, const ModelFamily& family) {
  const auto& tree = family.tree();
  ConsistentPriceSystem cps;
  const std::string model = text(require(doc, "model", "certificate"), "certificate.model");
  const auto theta = family.model_index(model);
  if (!theta) throw SpecError("certificate.model", "unknown model '" + model + "'");
  cps.theta = *theta;
  cps.lambda = number(require(doc, "lambda", "certificate"), "certificate.lambda");
  const auto& layers = require(doc, "layers", "certificate");
  if (!layers.is_array() || layers.size() != tree.num_layers()) {
    throw SpecError("certificate.layers", "expected " + std::to_string(tree.num_layers()) + " layers");
  }
  for (std::size_t k = 0; k < tree.num_layers(); ++k) {
    const std::string lf = at_index("certificate.layers", k);
    const auto& cells = require(layers[k], "cells", lf);
    const auto& part = tree.layer(k);
    if (!cells.is_array() || cells.size() != part.size()) {
      throw SpecError(join(lf, "cells"), "cell count does not match the market");
    }
    cps.z0.emplace_back();
    cps.z1.emplace_back();
    for (std::size_t c = 0; c < part.size(); ++c) {
      const std::string cf = at_index(join(lf, "cells"), c);
      const auto& sc = require(cells[c], "scenarios", cf);
      if (!sc.is_array() || sc.size() != part[c].size() ||
          text(sc.front(), join(cf, "scenarios")) != tree.labels()[part[c].front()]) {
        throw SpecError(join(cf, "scenarios"), "cell does not match the market");
      }
      cps.z0.back().push_back(number(require(cells[c], "z0", cf), join(cf, "z0")));
      cps.z1.back().push_back(number(require(cells[c], "z1", cf), join(cf, "z1")));
    }
  }
  return cps;
}

std::vector<double> claim_from_json(const Json& doc, const ScenarioTree& tree) {
  const auto& claim = require(doc, "claim", "");
  if (!claim.is_object()) throw SpecError("claim", "expected an object keyed by scenario label");
  std::vector<double> out;
  for (const auto& l : tree.labels()) out.push_back(number(require(claim, l, "claim"), join("claim", l)));
  for (const auto& [key, unused] : claim.items()) {
    (void)unused;
    if (!tree.scenario_index(key)) throw SpecError(join("claim", key), "unknown scenario");
  }
  for (std::size_t w = 0; w < out.size(); ++w) {
    if (!(out[w] >= 0.0)) throw SpecError(join("claim", tree.labels()[w]), "claim must be nonnegative");
  }
  return out;
}

}  // namespace tcr
