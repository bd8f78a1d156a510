#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmq {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad sizes, domains, encodings, orientations, schema problems. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Enumeration or evaluation would exceed a configured cap. CLI exit code 3.
class CapacityError : public Error {
public:
    CapacityError(const std::string& msg, double count)
        : Error(msg), count_(count) {}
    double count() const { return count_; }

private:
    double count_;
};

// Rejection sampling ran out of attempts.
class GenerationError : public Error {
public:
    GenerationError(const std::string& msg, int attempts)
        : Error(msg), attempts_(attempts) {}
    int attempts() const { return attempts_; }

private:
    int attempts_;
};

// Nonlinear fit did not converge; carries the last iterate.
class FitError : public Error {
public:
    FitError(const std::string& msg, std::vector<double> last_theta, double rmse)
        : Error(msg), last_theta_(std::move(last_theta)), rmse_(rmse) {}
    const std::vector<double>& last_theta() const { return last_theta_; }
    double rmse() const { return rmse_; }

private:
    std::vector<double> last_theta_;
    double rmse_;
};

// A grid scan contradicted the expected maximum. CLI exit code 4.
class WitnessError : public Error {
public:
    WitnessError(const std::string& msg, int p, bool z_odd, double r)
        : Error(msg), p_(p), z_odd_(z_odd), r_(r) {}
    int p() const { return p_; }
    bool z_odd() const { return z_odd_; }
    double r() const { return r_; }

private:
    int p_;
    bool z_odd_;
    double r_;
};

// Persisted file carries an unsupported schema version.
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// An executable claim (a bound, an equivalence) failed on concrete data.
// CLI exit code 4, like WitnessError.
class AssertionFailure : public Error {
public:
    using Error::Error;
};

} // namespace gmq
