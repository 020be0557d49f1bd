"""
Movelets from one sensor
========================

A walk through the single-sensor classifier on synthetic recordings: cut a
dictionary of short windows from a labeled training session, match every
window of a test session against it and smooth the matches with a forward
vote.
"""

import numpy as np

from jointmovelet import ActivityLabel, Mode
from jointmovelet.classify import classify_movelets, classify_series
from jointmovelet.evaluate import confusion_matrix
from jointmovelet.movelets import extract_movelets
from jointmovelet.pipeline import build_dictionary
from jointmovelet.synthetic import STEP_SCRIPTS, TRAINING_SCRIPT, simulate_recording

##############################################################################
# A training session
# ------------------
# The simulator produces accelerometer and gyroscope streams on their own
# jittered 10 Hz clocks. Labels are attached per sample from annotated
# intervals; gaps between intervals stay unlabeled.

training, _ = simulate_recording(TRAINING_SCRIPT, seed=1)
print({label.value: k for label, k in training.accel.counts().items()})

##############################################################################
# Building the dictionary
# -----------------------
# Each activity contributes the first 5 s of its first labeled run. With a
# window of 10 samples that is 50 - 10 + 1 = 41 movelets per activity; the
# 2 s transitions give fewer.

d = build_dictionary(training, Mode.ACCEL, person="demo")
for label, size in d.entry_sizes.items():
    print(f"{label.value:>12}: {size} movelets")

##############################################################################
# Matching windows
# ----------------
# A movelet taken from the training walk finds itself at zero discrepancy.

walk = training.accel.slice(0, 60)
tests = extract_movelets(walk.series.channels, walk.timestamps)
matches = classify_movelets(tests[:3], d)
for m in matches:
    print(m.index, m.label.value, round(m.discrepancy, 6))

##############################################################################
# Classifying a test session
# --------------------------
# Every time point receives the majority label of the matches of the ten
# windows starting at it. The session below goes stand, walk, sit, stand.

step2, _ = simulate_recording(STEP_SCRIPTS[2], seed=2)
timeline = classify_series(step2, d, Mode.ACCEL)
cm = confusion_matrix(timeline)
print(cm.to_text())
print("walk accuracy: %.1f%%" % cm.accuracy(ActivityLabel.WALK))

##############################################################################
# Where the mistakes are
# ----------------------
# Most errors sit at activity boundaries, where the forward vote looks into
# the next activity.

truth = np.array([t.value if t else "-" for t in timeline.truth])
pred = np.array([p.value for p in timeline.predicted])
wrong = np.flatnonzero((truth != pred) & (truth != "-"))
print("misclassified samples:", len(wrong), "of", timeline.labeled_count)
if len(wrong):
    boundaries = np.flatnonzero(truth[1:] != truth[:-1]) + 1
    near = np.min(np.abs(wrong[:, None] - boundaries[None, :]), axis=1) <= 10
    print("within 1 s of a boundary: %.0f%%" % (100 * near.mean()))
