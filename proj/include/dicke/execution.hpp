#pragma once

namespace dicke {

/// Selects the serial reference kernel or its OpenMP counterpart.  Both
/// produce bit-identical results; the serial path is kept as the reference.
enum class Execution { serial, parallel };

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int parallel_threads();

}  // namespace dicke
