"""
Radial Yamabe numerics - experiment registry

Lists the experiments the CLI can run on a run configuration. Each entry names
the Pipeline method that performs it and the files it writes.
"""

# Registry of available experiments
AVAILABLE_EXPERIMENTS = {
    "check": {
        "description": "Coercivity, condition at the center and feasibility of gamma",
        "method": "check",
        "outputs": [],
    },
    "solve": {
        "description": "Constrained minimizer at the configured exponent with seeded restarts",
        "method": "solve",
        "outputs": ["solve_trace.csv", "solve_solution.csv", "solve_summary.txt"],
    },
    "continue": {
        "description": "Subcritical continuation of the minimum up to the critical exponent",
        "method": "continuation",
        "outputs": ["continuation.csv", "continuation_summary.txt"],
    },
    "bubble-scan": {
        "description": "Bubble test-function quotients and their expansion coefficient",
        "method": "bubble_scan",
        "outputs": ["bubble_scan.csv", "bubble_report.txt"],
    },
}

__all__ = ["AVAILABLE_EXPERIMENTS"]
