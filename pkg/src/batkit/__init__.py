"""batkit: tunable binaural audio telepresence toolkit.

Converts microphone-array recordings into binaural signals with a user
controlled balance between ambience preservation and directional-speech
enhancement, plus the full synthetic-scene, feature, training and
evaluation pipeline around it.
"""

__version__ = "0.1.0"
