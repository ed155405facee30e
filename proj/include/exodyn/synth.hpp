#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "exodyn/rng.hpp"
#include "exodyn/types.hpp"

namespace exodyn {

// Two-harmonic periodic angle profile, C-infinity in phase (cycles per
// trial). Evaluated at phase p in cycles.
struct JointProfile {
    double center = 0.0;
    double amp1 = 0.0;
    double phase1 = 0.0;
    double amp2 = 0.0;
    double phase2 = 0.0;

    double operator()(double p) const {
        const double w = 2.0 * M_PI * p;
        return center + amp1 * std::sin(w + phase1) + amp2 * std::sin(2.0 * w + phase2);
    }
};

// Co-contraction level of one antagonist muscle pair as a function of phase;
// the split into the two channels is solved from the torque demand.
struct PairActivation {
    double base = 0.55;
    double amp = 0.2;
    int harmonic = 1;
    double phase = 0.0;

    double operator()(double p) const {
        const double s = std::sin(M_PI * harmonic * p + phase);
        return base + amp * s * s;
    }
};

struct TaskArchetype {
    TaskLabel label = TaskLabel::H;
    JointProfile elbow;
    JointProfile wrist;
    PairActivation emg_elbow;
    PairActivation emg_wrist;
    double thr_elbow = 0.30;  // robot action u0
    double thr_hand = 0.30;   // robot action u1
    int cycles = 5;
    double duration_s = 20.0;
    double rate_hz = 128.0;
    double phase_jitter = 0.02;  // fraction of one cycle, at most 0.05

    void validate() const {
        if (cycles < 1) throw InvalidArchetype("cycles must be >= 1");
        if (duration_s <= 0.0) throw InvalidArchetype("duration must be positive");
        if (rate_hz < 10.0) throw InvalidArchetype("sample rate must be >= 10 Hz");
        if (phase_jitter < 0.0 || phase_jitter > 0.05)
            throw InvalidArchetype("phase jitter above 5% of a cycle");
        for (int i = 0; i <= 512; ++i) {
            const double p = static_cast<double>(i) / 512.0 * cycles;
            if (std::abs(elbow(p)) > M_PI || std::abs(wrist(p)) > M_PI)
                throw InvalidArchetype("angle profile leaves [-pi, pi]");
            const double se = emg_elbow(p), sw = emg_wrist(p);
            if (se <= 0.0 || se > 2.0 || sw <= 0.0 || sw > 2.0)
                throw InvalidArchetype("activation profile leaves (0, 2]");
        }
    }
};

// Per-subject muscle calibration: drive gain and co-contraction baseline per
// antagonist pair, plus a threshold offset shared by both channels of u.
struct SubjectParams {
    std::string id = "S1";
    double gain_elbow = 5.0;
    double gain_wrist = 5.0;
    double base_elbow = 0.0;
    double base_wrist = 0.0;
    double thr_delta = 0.0;
};

inline SubjectParams make_subject(int index, std::uint64_t seed) {
    SplitMix64 rng(derive_seed({seed, 0x73756266u, static_cast<std::uint64_t>(index)}));
    SubjectParams s;
    s.id = "S" + std::to_string(index + 1);
    s.gain_elbow = rng.uniform(4.2, 5.8);
    s.gain_wrist = rng.uniform(4.2, 5.8);
    s.base_elbow = rng.uniform(0.0, 0.06);
    s.base_wrist = rng.uniform(0.0, 0.06);
    s.thr_delta = rng.uniform(-0.04, 0.04);
    return s;
}

// The generating dynamics f of x_{t+1} = x_t + f(x_t, u_t, v_t) + eta_t.
// State is [elbow angle, elbow velocity, wrist angle, wrist velocity]; each
// joint has unit inertia, viscous damping, a weak spring, and a saturating
// antagonist drive gated by how far the pair's co-contraction exceeds the
// threshold in u.
struct GroundTruth {
    double dt = 1.0 / 128.0;
    double damping = 2.5;
    double stiffness = 1.0;
    double torque_amp = 12.0;
    double gate_kappa = 8.0;
    double gain_elbow = 5.0;
    double gain_wrist = 5.0;

    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

    double gate(double pair_sum, double threshold) const {
        return sigmoid(gate_kappa * (pair_sum - threshold));
    }

    double torque(double diff, double pair_sum, double threshold, double gain) const {
        return torque_amp * std::tanh(gain * diff) * gate(pair_sum, threshold);
    }

    Vector delta(const Vector& x, const Vector& u, const Vector& v) const {
        if (x.size() != 4 || u.size() != 2 || v.size() != 4)
            throw DimensionMismatch("ground truth expects the 4/2/4 profile");
        const double tau_e = torque(v(0) - v(1), v(0) + v(1), u(0), gain_elbow);
        const double tau_w = torque(v(2) - v(3), v(2) + v(3), u(1), gain_wrist);
        Vector d(4);
        d(0) = x(1) * dt;
        d(1) = (tau_e - damping * x(1) - stiffness * x(0)) * dt;
        d(2) = x(3) * dt;
        d(3) = (tau_w - damping * x(3) - stiffness * x(2)) * dt;
        return d;
    }
};

inline GroundTruth make_ground_truth(const TaskArchetype& arch, const SubjectParams& subject) {
    GroundTruth gt;
    gt.dt = 1.0 / arch.rate_hz;
    gt.gain_elbow = subject.gain_elbow;
    gt.gain_wrist = subject.gain_wrist;
    return gt;
}

namespace detail {

// Designed joint trajectory on the discrete grid: velocity is the forward
// difference of the angle sequence and acceleration the forward difference of
// velocity, so simulating the recovered torques reproduces the samples.
struct DesignedJoint {
    Vector angle;  // T + 2 samples
    Vector vel;    // T + 1
    Vector accel;  // T
};

inline DesignedJoint design_joint(const JointProfile& profile, int steps, double dt,
                                  double cycles_per_s, double phase_offset) {
    DesignedJoint d;
    d.angle.resize(steps + 2);
    for (int t = 0; t < steps + 2; ++t)
        d.angle(t) = profile(cycles_per_s * dt * t + phase_offset);
    d.vel.resize(steps + 1);
    for (int t = 0; t < steps + 1; ++t) d.vel(t) = (d.angle(t + 1) - d.angle(t)) / dt;
    d.accel.resize(steps);
    for (int t = 0; t < steps; ++t) d.accel(t) = (d.vel(t + 1) - d.vel(t)) / dt;
    return d;
}

// Splits a torque demand into the two channels of an antagonist pair with the
// prescribed co-contraction sum. Fails when the demand saturates the drive.
inline void invert_pair(const GroundTruth& gt, double tau, double pair_sum,
                        double threshold, double gain, double& hi, double& lo) {
    const double cap = gt.torque_amp * gt.gate(pair_sum, threshold);
    const double a = tau / cap;
    if (!(std::abs(a) < 0.98))
        throw InvalidArchetype("profile demands torque beyond the drive range");
    const double diff = std::atanh(a) / gain;
    hi = 0.5 * (pair_sum + diff);
    lo = 0.5 * (pair_sum - diff);
    if (hi < 0.0 || hi > 1.0 || lo < 0.0 || lo > 1.0)
        throw InvalidArchetype("inverted activation leaves [0, 1]");
}

}  // namespace detail

// Simulates the archetype forward under the subject's ground truth. The user
// action stream is solved so the noiseless rollout reproduces the designed
// profiles sample for sample; noise then perturbs the state inside the loop.
inline std::vector<Trial> generate_task_for(const TaskArchetype& arch,
                                            const NoiseSpec& noise, int trials,
                                            std::uint64_t seed,
                                            const SubjectParams& subject) {
    arch.validate();
    if (trials < 1) throw InvalidArchetype("need at least one trial");
    noise.validate();
    if (noise.covariance.rows() != 4)
        throw DimensionMismatch("noise covariance must be 4x4 for the default state");
    const GroundTruth gt = make_ground_truth(arch, subject);
    const int steps = static_cast<int>(std::lround(arch.duration_s * arch.rate_hz));
    const double cycles_per_s = static_cast<double>(arch.cycles) / arch.duration_s;
    const Matrix noise_sqrt = noise.sqrt();
    const bool noisy = noise.covariance.cwiseAbs().maxCoeff() > 0.0;

    std::vector<Trial> out;
    for (int k = 0; k < trials; ++k) {
        SplitMix64 rng(derive_seed({seed, static_cast<std::uint64_t>(k)}));
        const double jitter = arch.phase_jitter > 0.0
                                  ? rng.uniform(-arch.phase_jitter, arch.phase_jitter)
                                  : 0.0;
        const auto elbow = detail::design_joint(arch.elbow, steps, gt.dt, cycles_per_s, jitter);
        const auto wrist = detail::design_joint(arch.wrist, steps, gt.dt, cycles_per_s, jitter);

        Trial trial;
        trial.task = arch.label;
        trial.subject = subject.id;
        trial.trial_index = k + 1;
        trial.sample_rate = arch.rate_hz;
        trial.states.resize(steps, 4);
        trial.robot_actions.resize(steps, 2);
        trial.user_actions.resize(steps, 4);

        const double thr_e = arch.thr_elbow + subject.thr_delta;
        const double thr_h = arch.thr_hand + subject.thr_delta;
        Vector x(4);
        x << elbow.angle(0), elbow.vel(0), wrist.angle(0), wrist.vel(0);
        for (int t = 0; t < steps; ++t) {
            const double p = cycles_per_s * gt.dt * t + jitter;
            const double sum_e = arch.emg_elbow(p) + subject.base_elbow;
            const double sum_w = arch.emg_wrist(p) + subject.base_wrist;
            const double tau_e = elbow.accel(t) + gt.damping * elbow.vel(t) +
                                 gt.stiffness * elbow.angle(t);
            const double tau_w = wrist.accel(t) + gt.damping * wrist.vel(t) +
                                 gt.stiffness * wrist.angle(t);
            Vector u(2), v(4);
            u << thr_e, thr_h;
            detail::invert_pair(gt, tau_e, sum_e, thr_e, gt.gain_elbow, v(0), v(1));
            detail::invert_pair(gt, tau_w, sum_w, thr_h, gt.gain_wrist, v(2), v(3));

            trial.states.row(t) = x.transpose();
            trial.robot_actions.row(t) = u.transpose();
            trial.user_actions.row(t) = v.transpose();

            x += gt.delta(x, u, v);
            if (noisy) {
                Vector z(4);
                for (int c = 0; c < 4; ++c) z(c) = rng.normal();
                x += noise_sqrt * z;
            }
        }
        out.push_back(std::move(trial));
    }
    return out;
}

inline std::vector<Trial> generate_task(const TaskArchetype& arch, const NoiseSpec& noise,
                                        int trials, std::uint64_t seed) {
    return generate_task_for(arch, noise, trials, seed, SubjectParams{});
}

// Default process-noise magnitudes: angle channels 0.005 rad, velocity
// channels 0.02 rad/s, independent.
inline NoiseSpec default_noise() {
    Vector v(4);
    v << 0.005 * 0.005, 0.02 * 0.02, 0.005 * 0.005, 0.02 * 0.02;
    return NoiseSpec::diagonal(v);
}

// Six motion archetypes with pairwise-distinct joint mixes and activation
// rhythms: H elbow-led, V wrist-led a quarter cycle out of phase, LR and RL
// mirrored diagonal mixes, E an asymmetric two-harmonic flexion-hold, P a
// faster extension-return with the highest cycle count.
inline std::vector<TaskArchetype> default_archetypes() {
    std::vector<TaskArchetype> out;

    TaskArchetype h;
    h.label = TaskLabel::H;
    h.elbow = {0.70, 0.45, 0.0, 0.05, 0.9};
    h.wrist = {0.15, 0.06, 1.2, 0.02, 0.3};
    h.emg_elbow = {0.55, 0.22, 1, 0.0};
    h.emg_wrist = {0.50, 0.12, 1, 0.5};
    out.push_back(h);

    TaskArchetype v;
    v.label = TaskLabel::V;
    v.elbow = {0.70, 0.06, M_PI / 2.0, 0.02, 1.1};
    v.wrist = {0.20, 0.40, M_PI / 2.0, 0.05, 0.2};
    v.emg_elbow = {0.52, 0.12, 1, 1.1};
    v.emg_wrist = {0.56, 0.22, 1, 0.3};
    v.cycles = 5;
    out.push_back(v);

    TaskArchetype lr;
    lr.label = TaskLabel::LR;
    lr.elbow = {0.65, 0.32, 0.3, 0.04, 0.7};
    lr.wrist = {0.28, 0.26, 0.3, 0.03, 1.4};
    lr.emg_elbow = {0.54, 0.18, 2, 0.2};
    lr.emg_wrist = {0.54, 0.18, 2, 0.9};
    out.push_back(lr);

    TaskArchetype rl;
    rl.label = TaskLabel::RL;
    rl.elbow = {0.65, 0.32, 0.3, 0.04, 0.7};
    rl.wrist = {0.28, -0.26, 0.3, -0.03, 1.4};
    rl.emg_elbow = {0.54, 0.18, 2, 0.7};
    rl.emg_wrist = {0.54, 0.18, 2, 0.1};
    out.push_back(rl);

    TaskArchetype e;
    e.label = TaskLabel::E;
    e.elbow = {1.00, 0.50, 0.0, 0.18, 1.2};
    e.wrist = {0.35, 0.12, 0.7, 0.05, 0.4};
    e.emg_elbow = {0.60, 0.20, 1, 0.6};
    e.emg_wrist = {0.52, 0.10, 2, 0.2};
    e.cycles = 4;
    out.push_back(e);

    TaskArchetype p;
    p.label = TaskLabel::P;
    p.elbow = {0.50, 0.30, 0.0, 0.05, 0.5};
    p.wrist = {0.22, 0.16, 2.2, 0.06, 1.0};
    p.emg_elbow = {0.58, 0.24, 3, 0.0};
    p.emg_wrist = {0.55, 0.16, 3, 0.8};
    p.cycles = 8;
    out.push_back(p);

    for (const TaskArchetype& a : out) a.validate();
    return out;
}

}  // namespace exodyn
