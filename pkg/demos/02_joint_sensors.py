"""
Combining accelerometer and gyroscope
=====================================

The two sensors sample on different clocks, so the gyroscope is first
interpolated onto the accelerometer timestamps. Each movelet then has six
channels and its discrepancy is the mean over all six axis distances, which
is the average of the two single-sensor discrepancies.
"""

import numpy as np

from jointmovelet import ActivityLabel, Mode
from jointmovelet.classify import classify_series, map_to_accel_timestamps
from jointmovelet.evaluate import ActivityGroup, confusion_matrix, group_average_accuracy
from jointmovelet.movelets import discrepancy
from jointmovelet.pipeline import build_dictionary
from jointmovelet.sync import synchronize
from jointmovelet.synthetic import STEP_SCRIPTS, TRAINING_SCRIPT, simulate_recording

##############################################################################
# Two clocks
# ----------
# The simulated gyroscope runs 40 ms behind the accelerometer, with jitter
# on both.

training, _ = simulate_recording(TRAINING_SCRIPT, seed=5)
a_t, g_t = training.accel.timestamps, training.gyro.timestamps
print("first accel stamps:", np.round(a_t[:3], 3))
print("first gyro stamps: ", np.round(g_t[:3], 3))

##############################################################################
# Synchronising
# -------------
# Accelerometer samples outside the gyroscope's time span are dropped, never
# extrapolated. The accelerometer values pass through unchanged.

synced = synchronize(training.accel.series, training.gyro.series)
print("dropped at head/tail:", synced.clipped_head, synced.clipped_tail)
print("accel untouched:", np.array_equal(synced.series.accel, training.accel.series.values[synced.retained]))

##############################################################################
# The joint discrepancy
# ---------------------
# For any two six-channel windows the joint value is exactly half the sum of
# the accelerometer and gyroscope values.

rng = np.random.default_rng(0)
x, y = rng.normal(size=(6, 10)), rng.normal(size=(6, 10))
joint = discrepancy(x, y).value
parts = discrepancy(x[:3], y[:3]).value, discrepancy(x[3:], y[3:]).value
print("joint %.6f  half-sum %.6f" % (joint, 0.5 * sum(parts)))

##############################################################################
# Three methods on the same session
# ---------------------------------
# Sitting and standing differ only in posture, which the gyroscope cannot
# see. Combining the sensors keeps the accelerometer's grip on posture.

script = ((ActivityLabel.STAND, 6.0), (ActivityLabel.WALK, 10.0),
          (ActivityLabel.STAND_TO_SIT, 2.0), (ActivityLabel.SIT, 8.0))
session, _ = simulate_recording(script, seed=6)

for mode in Mode:
    d = build_dictionary(training, mode)
    tl = classify_series(session, d, mode)
    if mode is Mode.GYRO:
        tl = map_to_accel_timestamps(tl, session.accel.timestamps, session.accel.labels)
    cm = confusion_matrix(tl)
    stationary = group_average_accuracy(cm, ActivityGroup.STATIONARY)
    print(f"{mode.value:>10}: stationary {stationary:5.1f}%  walk {cm.accuracy(ActivityLabel.WALK):5.1f}%")

##############################################################################
# The scripted study sessions are available too, e.g. ``STEP_SCRIPTS[2]``
# alternates walking, sitting and standing.

print([label.value for label, _ in STEP_SCRIPTS[2]])
