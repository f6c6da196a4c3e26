"""Periodic foot trajectory targets for stepping gaits.

A stepping foot follows a rectified sinusoid in height,

    h(t) = max(a * sin(2*pi*b*t + 2*pi*c), 0)

with amplitude a, frequency b (Hz), and phase offset c in [0, 1] cycles.
The air ratio reshapes the duty cycle: the foot's height target is held at
zero for the (1 - air_ratio) fraction of each period centered on the
sinusoid's negative lobe, and the positive arch is compressed or stretched
to fill the remaining air window.  An air ratio of 0.5 reproduces the plain
rectified sinusoid exactly.

The horizontal swing is a sinusoid of the same frequency and phase, a
quarter period behind the height arch, so a foot with positive
swing_forward_back travels forward while in the air and back while on the
ground, tracing a walking circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nl2mpc.errors import ValidationError


@dataclass(frozen=True)
class FootGaitParams:
    amplitude: float          # peak lift height a (m)
    frequency: float          # cycles per second b (Hz)
    phase_offset: float       # c, in cycles, [0, 1]
    air_ratio: float = 0.5    # fraction of the cycle spent in the air
    swing_forward_back: float = 0.0  # forward/back swing amplitude (m)

    def __post_init__(self):
        if not (self.amplitude >= 0.0):
            raise ValidationError(f"gait amplitude must be >= 0, got {self.amplitude}")
        if not (self.frequency >= 0.0):
            raise ValidationError(f"gait frequency must be >= 0, got {self.frequency}")
        if not (0.0 <= self.phase_offset <= 1.0):
            raise ValidationError(
                f"gait phase offset must be in [0, 1], got {self.phase_offset}"
            )
        if not (0.0 <= self.air_ratio <= 1.0):
            raise ValidationError(
                f"gait air ratio must be in [0, 1], got {self.air_ratio}"
            )


def foot_target_height(t, g: FootGaitParams):
    """Rectified-sinusoid height target max(a*sin(2*pi*b*t + 2*pi*c), 0)."""
    t = np.asarray(t, dtype=float)
    h = np.maximum(g.amplitude * np.sin(2.0 * np.pi * (g.frequency * t + g.phase_offset)), 0.0)
    if h.ndim == 0:
        return float(h)
    return h


def duty_cycled_height(t, g: FootGaitParams):
    """Height target with the air window resized to air_ratio of the period.

    The cycle position u = frac(b*t + c) is in the air window when it lies
    within air_ratio/2 of the arch center at u = 1/4 (the ground window of
    width 1 - air_ratio is centered on the negative lobe at u = 3/4).  Inside
    the window the arch is a half sine over the window, so the target is
    continuous, zero at both window edges, and peaks at the amplitude.
    """
    t = np.asarray(t, dtype=float)
    if g.air_ratio == 0.0 or g.frequency == 0.0:
        z = np.zeros_like(t)
        return float(z) if z.ndim == 0 else z
    u = np.mod(g.frequency * t + g.phase_offset, 1.0)
    # signed distance from the arch center at u = 0.25, wrapped to (-0.5, 0.5]
    d = u - 0.25
    d = d - np.round(d)
    inside = np.abs(d) < g.air_ratio / 2.0
    # mask before dividing so a tiny air ratio cannot produce cos(inf)
    arg = np.pi * np.where(inside, d, 0.0) / g.air_ratio
    arch = g.amplitude * np.cos(arg)
    h = np.where(inside, np.maximum(arch, 0.0), 0.0)
    if h.ndim == 0:
        return float(h)
    return h


def swing_target_offset(t, g: FootGaitParams):
    """Forward/back swing offset from the foot's home x position.

    A quarter period behind the height arch: -cos of the same phase.  The
    foot moves from -swing to +swing while airborne (walking forward for a
    positive swing amplitude) and sweeps back during stance.
    """
    t = np.asarray(t, dtype=float)
    x = -g.swing_forward_back * np.cos(
        2.0 * np.pi * (g.frequency * t + g.phase_offset)
    )
    if x.ndim == 0:
        return float(x)
    return x
