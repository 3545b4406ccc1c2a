#pragma once

namespace scanseg {

struct MomentumParams {
    bool on = false;
    double peak = 2.5;
    double floor = 0.85;
    double half_width_deg = 35.0;
};

struct PresaccadicParams {
    bool on = false;
    double trigger_fraction = 0.3;  // of the active threshold
};

struct DeadTimeParams {
    bool on = false;
    double ms = 50.0;
    double theta = 3.5;  // replaces theta while on
};

struct DecisionParams {
    double theta = 4.0;
    double s = 0.4;
    double u_min = 1.0 / 3.0;
    double f_min = 0.0;
    double sigma_s_dva = 7.0;
    double blur_sigma_dva = 1.0;
    // false: U' is held at u_min everywhere (no-uncertainty ablation)
    bool use_uncertainty = true;
    MomentumParams momentum;
    PresaccadicParams presaccadic;
    DeadTimeParams deadtime;

    double active_theta() const { return deadtime.on ? deadtime.theta : theta; }
    double dead_ms() const { return deadtime.on ? deadtime.ms : 0.0; }
    void validate() const;
};

}  // namespace scanseg
