import numpy as np
import tensorflow as tf
import os
import random

os.environ['PYTHONHASHSEED'] = SEED
random.seed(SEED)
np.random.seed(SEED)
tf.random.set_seed(SEED)
os.environ['TF_DETERMINISTIC_OPS'] = '1'
session_config.intra_op_parallelism_threads = 1
session_config.inter_op_parallelism_threads = 1
