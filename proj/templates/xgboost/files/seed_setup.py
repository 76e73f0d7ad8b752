"""Seeds every random number generator used around XGBoost training.

Import this module before loading data. XGBoost itself is seeded through the
'seed' entry of the training parameters in train.py.
"""
import os
import random

import numpy as np

SEED = {{ seed }}

os.environ['PYTHONHASHSEED'] = str(SEED)
random.seed(SEED)
np.random.seed(SEED)
