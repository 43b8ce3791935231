#pragma once

/// Runs the invariant suite, prints one line per check, returns overall success.
bool run_checks(int seed_basis);
