"""Seeds every random number generator and enables TensorFlow's deterministic ops.

Import this module before TensorFlow builds its first graph.
"""
import os
import random

import numpy as np
import tensorflow as tf

SEED = {{ seed }}

os.environ['PYTHONHASHSEED'] = str(SEED)
random.seed(SEED)
np.random.seed(SEED)
tf.random.set_seed(SEED)
os.environ['TF_DETERMINISTIC_OPS'] = '1'

session_config = tf.compat.v1.ConfigProto()
session_config.intra_op_parallelism_threads = 1
session_config.inter_op_parallelism_threads = 1
tf.compat.v1.keras.backend.set_session(tf.compat.v1.Session(config=session_config))
