#include "demograph/handselect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "demograph/errors.hpp"
#include "demograph/random.hpp"

namespace demograph {

namespace {

std::array<double, 4> model_input(const SelectorModel& m, const SelectorState& s) {
    auto x = s.features();
    for (std::size_t i = 0; i < 4; ++i) x[i] = (x[i] - m.input_offset[i]) / m.input_scale[i];
    return x;
}

ForwardResult forward_unchecked(const SelectorModel& m, const SelectorState& s) {
    const auto x = model_input(m, s);
    const auto H = static_cast<std::size_t>(m.hidden_size);
    ForwardResult r;
    r.hidden.resize(H);
    for (std::size_t k = 0; k < H; ++k) {
        double z = m.b1[k];
        for (std::size_t i = 0; i < 4; ++i) z += x[i] * m.w1[i * H + k];
        r.hidden[k] = std::tanh(z);
    }
    for (std::size_t a = 0; a < 2; ++a) {
        double z = m.b2[a];
        for (std::size_t k = 0; k < H; ++k) z += r.hidden[k] * m.w2[k * 2 + a];
        r.logits[a] = z;
    }
    const double top = std::max(r.logits[0], r.logits[1]);
    const double lse = top + std::log(std::exp(r.logits[0] - top) + std::exp(r.logits[1] - top));
    for (std::size_t a = 0; a < 2; ++a) r.probabilities[a] = std::exp(r.logits[a] - lse);
    return r;
}

/// -ln pi(expert) computed from logits for accuracy near saturation.
double neg_log_prob(const ForwardResult& r, HandAction expert) {
    const double top = std::max(r.logits[0], r.logits[1]);
    const double lse = top + std::log(std::exp(r.logits[0] - top) + std::exp(r.logits[1] - top));
    return lse - r.logits[static_cast<std::size_t>(action_index(expert))];
}

HandAction argmax_action(const ForwardResult& r) {
    return r.probabilities[1] > r.probabilities[0] ? HandAction::UseRightHand : HandAction::UseLeftHand;
}

void require_finite(const Vec3& v, const char* what) {
    if (!v.finite()) fail(ErrorCode::NonFiniteInput, std::string(what) + " position is not finite");
}

std::vector<double> read_vector(const nlohmann::json& j, const char* key, std::size_t n) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
        fail(ErrorCode::SchemaViolation, std::string("model field '") + key + "' must be an array of " + std::to_string(n));
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) fail(ErrorCode::SchemaViolation, std::string("model field '") + key + "' must be numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

const char* to_string(HandAction a) { return a == HandAction::UseLeftHand ? "left" : "right"; }

std::optional<HandAction> parse_hand_action(const std::string& text) {
    if (text == "left") return HandAction::UseLeftHand;
    if (text == "right") return HandAction::UseRightHand;
    return std::nullopt;
}

void SelectorHyperparams::validate() const {
    if (!(r_bonus > 0.0) || !(r_penalty > 0.0) || !std::isfinite(r_bonus) || !std::isfinite(r_penalty))
        fail(ErrorCode::InvalidConfig, "selector.r_bonus and selector.r_penalty must be > 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidConfig, "selector.kappa must be >= 0");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        fail(ErrorCode::InvalidConfig, "selector.learning_rate must be > 0");
    if (epochs < 0) fail(ErrorCode::InvalidConfig, "selector.epochs must be >= 0");
    if (hidden_size < 1) fail(ErrorCode::InvalidConfig, "selector.hidden_size must be >= 1");
}

SelectorModel SelectorModel::zeros(int hidden_size) {
    SelectorModel m;
    m.hidden_size = hidden_size;
    const auto H = static_cast<std::size_t>(hidden_size);
    m.w1.assign(4 * H, 0.0);
    m.b1.assign(H, 0.0);
    m.w2.assign(H * 2, 0.0);
    m.b2.assign(2, 0.0);
    m.hyperparams.hidden_size = hidden_size;
    return m;
}

double& SelectorModel::parameter(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    return b2[i - w2.size()];
}

double SelectorModel::parameter(std::size_t i) const { return const_cast<SelectorModel*>(this)->parameter(i); }

void SelectorModel::validate() const {
    const auto H = static_cast<std::size_t>(std::max(hidden_size, 0));
    if (hidden_size < 1 || w1.size() != 4 * H || b1.size() != H || w2.size() != 2 * H || b2.size() != 2)
        fail(ErrorCode::NonFiniteParameters, "selector model has inconsistent shapes");
    for (std::size_t i = 0; i < parameter_count(); ++i)
        if (!std::isfinite(parameter(i))) fail(ErrorCode::NonFiniteParameters, "selector model has a non-finite parameter");
    for (std::size_t i = 0; i < 4; ++i)
        if (!std::isfinite(input_offset[i]) || !std::isfinite(input_scale[i]) || input_scale[i] == 0.0)
            fail(ErrorCode::NonFiniteParameters, "selector model has an invalid input transform");
}

SelectorState selector_state(const Vec3& left_hand, const Vec3& right_hand, const Vec3& source, const Vec3& target) {
    return selector_state(left_hand, right_hand, source, source, target);
}

SelectorState selector_state(const Vec3& left_hand, const Vec3& right_hand, const Vec3& left_source,
                             const Vec3& right_source, const Vec3& target) {
    require_finite(left_hand, "left hand");
    require_finite(right_hand, "right hand");
    require_finite(left_source, "source");
    require_finite(right_source, "source");
    require_finite(target, "target");
    return {distance(left_source, left_hand), distance(right_source, right_hand), distance(target, left_hand),
            distance(target, right_hand)};
}

HandAction prior_policy(const SelectorState& s) {
    return s.r_right_target < s.r_left_target ? HandAction::UseLeftHand : HandAction::UseRightHand;
}

ForwardResult classifier_forward(const SelectorModel& model, const SelectorState& s) {
    model.validate();
    return forward_unchecked(model, s);
}

HandAction classifier_action(const SelectorModel& model, const SelectorState& s) {
    return argmax_action(classifier_forward(model, s));
}

double imitation_signal(HandAction chosen, HandAction expert, const SelectorHyperparams& hp) {
    return chosen == expert ? hp.r_bonus : -hp.r_penalty;
}

double training_loss(const SelectorModel& model, const SelectorState& s, HandAction expert,
                     const SelectorHyperparams& hp) {
    return hp.r_bonus * neg_log_prob(classifier_forward(model, s), expert);
}

std::vector<double> sample_weights(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                   const SelectorHyperparams& hp) {
    model.validate();
    std::vector<double> w;
    w.reserve(batch.size());
    for (const auto& b : batch) w.push_back(argmax_action(forward_unchecked(model, b.state)) == b.expert ? 1.0 : hp.r_penalty);
    return w;
}

double batch_loss(const SelectorModel& model, const std::vector<LabeledState>& batch, const SelectorHyperparams& hp,
                  const std::vector<double>& weights) {
    if (batch.empty()) fail(ErrorCode::EmptyBatch, "batch is empty");
    model.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i)
        sum += weights[i] * hp.r_bonus * neg_log_prob(forward_unchecked(model, batch[i].state), batch[i].expert);
    return sum / static_cast<double>(batch.size());
}

double batch_loss(const SelectorModel& model, const std::vector<LabeledState>& batch, const SelectorHyperparams& hp) {
    if (batch.empty()) fail(ErrorCode::EmptyBatch, "batch is empty");
    return batch_loss(model, batch, hp, sample_weights(model, batch, hp));
}

SelectorModel training_gradient(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                const SelectorHyperparams& hp, const std::vector<double>& weights) {
    if (batch.empty()) fail(ErrorCode::EmptyBatch, "batch is empty");
    model.validate();
    const auto H = static_cast<std::size_t>(model.hidden_size);
    SelectorModel g = SelectorModel::zeros(model.hidden_size);
    const double n = static_cast<double>(batch.size());
    std::vector<double> dz(H);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto x = model_input(model, batch[i].state);
        const auto r = forward_unchecked(model, batch[i].state);
        const double scale = weights[i] * hp.r_bonus / n;
        std::array<double, 2> d{};
        for (std::size_t a = 0; a < 2; ++a) {
            const double y = static_cast<int>(a) == action_index(batch[i].expert) ? 1.0 : 0.0;
            d[a] = scale * (r.probabilities[a] - y);
            g.b2[a] += d[a];
        }
        for (std::size_t k = 0; k < H; ++k) {
            const double h = r.hidden[k];
            g.w2[k * 2] += h * d[0];
            g.w2[k * 2 + 1] += h * d[1];
            dz[k] = (model.w2[k * 2] * d[0] + model.w2[k * 2 + 1] * d[1]) * (1.0 - h * h);
            g.b1[k] += dz[k];
        }
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < H; ++k) g.w1[j * H + k] += x[j] * dz[k];
    }
    return g;
}

SelectorModel training_gradient(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                const SelectorHyperparams& hp) {
    if (batch.empty()) fail(ErrorCode::EmptyBatch, "batch is empty");
    return training_gradient(model, batch, hp, sample_weights(model, batch, hp));
}

SelectorModel init_model(const SelectorHyperparams& hp) {
    hp.validate();
    SelectorModel m = SelectorModel::zeros(hp.hidden_size);
    Rng rng(hp.seed, "selector.init");
    for (std::size_t i = 0; i < m.parameter_count(); ++i) m.parameter(i) = rng.uniform(-0.1, 0.1);
    m.seed = hp.seed;
    m.hyperparams = hp;
    return m;
}

SelectorModel train(const std::vector<LabeledState>& dataset, const SelectorHyperparams& hp) {
    if (dataset.empty()) fail(ErrorCode::EmptyDataset, "training dataset is empty");
    SelectorModel m = init_model(hp);
    if (hp.normalize_features) {
        for (std::size_t i = 0; i < 4; ++i) {
            double mean = 0.0;
            for (const auto& d : dataset) mean += d.state.features()[i];
            mean /= static_cast<double>(dataset.size());
            double var = 0.0;
            for (const auto& d : dataset) var += (d.state.features()[i] - mean) * (d.state.features()[i] - mean);
            const double sd = std::sqrt(var / static_cast<double>(dataset.size()));
            m.input_offset[i] = mean;
            m.input_scale[i] = sd > 0.0 ? sd : 1.0;
        }
    }
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        const auto g = training_gradient(m, dataset, hp);
        for (std::size_t i = 0; i < m.parameter_count(); ++i) m.parameter(i) -= hp.learning_rate * g.parameter(i);
    }
    return m;
}

double agreement(const SelectorModel& model, const std::vector<LabeledState>& dataset) {
    if (dataset.empty()) return 1.0;
    model.validate();
    std::size_t hits = 0;
    for (const auto& d : dataset) hits += argmax_action(forward_unchecked(model, d.state)) == d.expert ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

FusedDecision fused_decision(const SelectorModel& model, const SelectorState& s, double kappa) {
    const auto r = classifier_forward(model, s);
    const auto prior = prior_policy(s);
    FusedDecision out;
    for (std::size_t a = 0; a < 2; ++a) {
        const double lp = -neg_log_prob(r, a == 0 ? HandAction::UseLeftHand : HandAction::UseRightHand);
        out.scores[a] = lp + (static_cast<int>(a) == action_index(prior) ? kappa : 0.0);
    }
    const auto alt = other(prior);
    out.action = out.scores[static_cast<std::size_t>(action_index(alt))] >
                         out.scores[static_cast<std::size_t>(action_index(prior))]
                     ? alt
                     : prior;
    return out;
}

HandAction decide_with_persistence(std::optional<HandAction> current, bool eoo_docked_active,
                                   const SelectorModel& model, const SelectorState& s, double kappa) {
    if (eoo_docked_active && current) return *current;
    return fused_decision(model, s, kappa).action;
}

std::string model_to_json(const SelectorModel& m) {
    const auto& hp = m.hyperparams;
    nlohmann::ordered_json j;
    j["hidden_size"] = m.hidden_size;
    j["w1"] = m.w1;
    j["b1"] = m.b1;
    j["w2"] = m.w2;
    j["b2"] = m.b2;
    j["input_offset"] = m.input_offset;
    j["input_scale"] = m.input_scale;
    j["seed"] = m.seed;
    j["hyperparams"] = {{"r_bonus", hp.r_bonus},
                        {"r_penalty", hp.r_penalty},
                        {"kappa", hp.kappa},
                        {"learning_rate", hp.learning_rate},
                        {"epochs", hp.epochs},
                        {"hidden_size", hp.hidden_size},
                        {"normalize_features", hp.normalize_features},
                        {"seed", hp.seed}};
    return j.dump(2) + "\n";
}

SelectorModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::SchemaViolation, std::string("model is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("hidden_size") || !j["hidden_size"].is_number_integer())
        fail(ErrorCode::SchemaViolation, "model field 'hidden_size' must be an integer");
    SelectorModel m;
    m.hidden_size = j["hidden_size"].get<int>();
    if (m.hidden_size < 1) fail(ErrorCode::SchemaViolation, "model field 'hidden_size' must be >= 1");
    const auto H = static_cast<std::size_t>(m.hidden_size);
    m.w1 = read_vector(j, "w1", 4 * H);
    m.b1 = read_vector(j, "b1", H);
    m.w2 = read_vector(j, "w2", 2 * H);
    m.b2 = read_vector(j, "b2", 2);
    const auto off = read_vector(j, "input_offset", 4);
    const auto sc = read_vector(j, "input_scale", 4);
    std::copy(off.begin(), off.end(), m.input_offset.begin());
    std::copy(sc.begin(), sc.end(), m.input_scale.begin());
    try {
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto& h = j.at("hyperparams");
        auto& hp = m.hyperparams;
        hp.r_bonus = h.at("r_bonus").get<double>();
        hp.r_penalty = h.at("r_penalty").get<double>();
        hp.kappa = h.at("kappa").get<double>();
        hp.learning_rate = h.at("learning_rate").get<double>();
        hp.epochs = h.at("epochs").get<int>();
        hp.hidden_size = h.at("hidden_size").get<int>();
        hp.normalize_features = h.at("normalize_features").get<bool>();
        hp.seed = h.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::SchemaViolation, std::string("model metadata: ") + e.what());
    }
    m.validate();
    return m;
}

std::string dataset_to_jsonl(const std::vector<LabeledState>& dataset) {
    std::string out;
    for (const auto& d : dataset) {
        nlohmann::ordered_json j = {{"state", d.state.features()}, {"expert", to_string(d.expert)}};
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<LabeledState> dataset_from_jsonl(const std::string& text) {
    std::vector<LabeledState> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            fail(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": not valid JSON");
        }
        if (!j.is_object() || j.size() != 2 || !j.contains("state") || !j.contains("expert"))
            fail(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": expected keys 'state' and 'expert'");
        const auto& s = j["state"];
        if (!s.is_array() || s.size() != 4)
            fail(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": 'state' must hold 4 numbers");
        std::array<double, 4> v{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!s[i].is_number() || !std::isfinite(s[i].get<double>()) || s[i].get<double>() < 0.0)
                fail(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": 'state' entries must be finite and >= 0");
            v[i] = s[i].get<double>();
        }
        const auto expert = j["expert"].is_string() ? parse_hand_action(j["expert"].get<std::string>()) : std::nullopt;
        if (!expert) fail(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": 'expert' must be left or right");
        out.push_back({{v[0], v[1], v[2], v[3]}, *expert});
    }
    return out;
}

}  // namespace demograph
