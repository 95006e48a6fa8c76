#pragma once

#include <stdexcept>
#include <string>

namespace molspin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field is tuned onto an excited potential at the evaluated separation.
class ResonancePole : public Error {
 public:
  ResonancePole(std::string label, double separation, double detuning)
      : Error("resonance pole: field tuned onto " + label + " at r = " +
              std::to_string(separation) + " (detuning " +
              std::to_string(detuning) + ")"),
        label_(std::move(label)),
        separation_(separation),
        detuning_(detuning) {}

  const std::string& label() const { return label_; }
  double separation() const { return separation_; }
  double detuning() const { return detuning_; }

 private:
  std::string label_;
  double separation_;
  double detuning_;
};

/// An excited potential crosses the photon energy inside the wavepacket support.
class PoleInsideWavepacket : public Error {
 public:
  PoleInsideWavepacket(std::string label, double r_low, double r_high)
      : Error("detuning from " + label + " changes sign inside the wavepacket support [" +
              std::to_string(r_low) + ", " + std::to_string(r_high) + "]"),
        label_(std::move(label)) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

/// Spin count exceeds what the dense eigensolver accepts.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class NoImprovement : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace molspin
