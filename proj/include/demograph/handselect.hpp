#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "demograph/trajectory.hpp"

namespace demograph {

/// Distances of each hand to the source pile and to the target pose (m).
struct SelectorState {
    double r_left_source = 0.0;
    double r_right_source = 0.0;
    double r_left_target = 0.0;
    double r_right_target = 0.0;

    std::array<double, 4> features() const { return {r_left_source, r_right_source, r_left_target, r_right_target}; }
    friend bool operator==(const SelectorState&, const SelectorState&) = default;
};

enum class HandAction { UseLeftHand, UseRightHand };

/// "left" / "right".
const char* to_string(HandAction a);
std::optional<HandAction> parse_hand_action(const std::string& text);
inline int action_index(HandAction a) { return a == HandAction::UseLeftHand ? 0 : 1; }
inline HandAction other(HandAction a) {
    return a == HandAction::UseLeftHand ? HandAction::UseRightHand : HandAction::UseLeftHand;
}

struct LabeledState {
    SelectorState state;
    HandAction expert = HandAction::UseLeftHand;

    friend bool operator==(const LabeledState&, const LabeledState&) = default;
};

struct SelectorHyperparams {
    double r_bonus = 1.0;
    double r_penalty = 1.0;
    double kappa = 1.0;
    double learning_rate = 0.05;
    int epochs = 500;
    int hidden_size = 16;
    bool normalize_features = false;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const SelectorHyperparams&, const SelectorHyperparams&) = default;
};

/// One-hidden-layer tanh MLP with two output logits. Weights are row-major:
/// w1 is 4 x H (input i to hidden k at i*H + k), w2 is H x 2.
struct SelectorModel {
    int hidden_size = 0;
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2;
    std::array<double, 4> input_offset{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> input_scale{1.0, 1.0, 1.0, 1.0};
    std::uint64_t seed = 0;
    SelectorHyperparams hyperparams;

    static SelectorModel zeros(int hidden_size);
    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    /// Flat view over w1, b1, w2, b2 in that order.
    double& parameter(std::size_t i);
    double parameter(std::size_t i) const;
    void validate() const;

    friend bool operator==(const SelectorModel&, const SelectorModel&) = default;
};

struct ForwardResult {
    std::array<double, 2> logits{};
    std::array<double, 2> probabilities{};
    std::vector<double> hidden;
};

/// Throws NonFiniteInput.
SelectorState selector_state(const Vec3& left_hand, const Vec3& right_hand, const Vec3& source, const Vec3& target);
/// Separate source points per hand, e.g. the left and right piles.
SelectorState selector_state(const Vec3& left_hand, const Vec3& right_hand, const Vec3& left_source,
                             const Vec3& right_source, const Vec3& target);

/// Use the hand contralateral to the target side; ties go to the right hand.
HandAction prior_policy(const SelectorState& s);

/// Throws NonFiniteParameters.
ForwardResult classifier_forward(const SelectorModel& model, const SelectorState& s);
HandAction classifier_action(const SelectorModel& model, const SelectorState& s);

double imitation_signal(HandAction chosen, HandAction expert, const SelectorHyperparams& hp);

/// r_bonus * -ln pi(expert | s).
double training_loss(const SelectorModel& model, const SelectorState& s, HandAction expert,
                     const SelectorHyperparams& hp);

/// Batch aggregation weights: r_penalty for samples the model currently
/// mispredicts, 1 otherwise.
std::vector<double> sample_weights(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                   const SelectorHyperparams& hp);

/// Weighted mean of training_loss. Throws EmptyBatch.
double batch_loss(const SelectorModel& model, const std::vector<LabeledState>& batch, const SelectorHyperparams& hp,
                  const std::vector<double>& weights);
double batch_loss(const SelectorModel& model, const std::vector<LabeledState>& batch, const SelectorHyperparams& hp);

/// Gradient of batch_loss with the weights held fixed, shaped like the model.
SelectorModel training_gradient(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                const SelectorHyperparams& hp, const std::vector<double>& weights);
SelectorModel training_gradient(const SelectorModel& model, const std::vector<LabeledState>& batch,
                                const SelectorHyperparams& hp);

SelectorModel init_model(const SelectorHyperparams& hp);

/// Full-batch gradient descent. Deterministic given hp.seed. Throws EmptyDataset.
SelectorModel train(const std::vector<LabeledState>& dataset, const SelectorHyperparams& hp);

/// Fraction of samples whose classifier argmax equals the label.
double agreement(const SelectorModel& model, const std::vector<LabeledState>& dataset);

struct FusedDecision {
    HandAction action = HandAction::UseLeftHand;
    std::array<double, 2> scores{};  // left, right
};

/// argmax of ln pi(a|s) + kappa * [a = prior]; ties go to the prior.
FusedDecision fused_decision(const SelectorModel& model, const SelectorState& s, double kappa);

HandAction decide_with_persistence(std::optional<HandAction> current, bool eoo_docked_active,
                                   const SelectorModel& model, const SelectorState& s, double kappa);

std::string model_to_json(const SelectorModel& model);
SelectorModel model_from_json(const std::string& text);

std::string dataset_to_jsonl(const std::vector<LabeledState>& dataset);
std::vector<LabeledState> dataset_from_jsonl(const std::string& text);

}  // namespace demograph
