"""Language-driven robot skill synthesis on surrogate dynamics.

The package turns a natural-language instruction into a weighted reward
specification through a two-stage translation pipeline, then tracks that
specification online with a receding-horizon trajectory optimizer.  It ships
two surrogate embodiments (a quadruped torso model and a tabletop
manipulator), two planner backends (predictive sampling and iLQG), an
interactive session service with replay persistence, and an evaluation
harness with a scripted-primitive baseline.
"""

__version__ = "0.1.0"
