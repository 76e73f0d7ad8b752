"""Minimal training loop for {{ project_name }}."""
import argparse

import seed_setup  # noqa: F401  (must run before any other TensorFlow work)
import numpy as np
import tensorflow as tf


def parse_args():
    parser = argparse.ArgumentParser(description='Train {{ project_name }}.')
    parser.add_argument('--epochs', type=int, default=5)
    parser.add_argument('--lr', type=float, default=0.01)
    return parser.parse_args()


def main():
    args = parse_args()
    features = np.random.rand(256, 16).astype('float32')
    target = features.sum(axis=1, keepdims=True)

    model = tf.keras.Sequential([
        tf.keras.layers.Dense(32, activation='relu', input_shape=(16,)),
        tf.keras.layers.Dense(1),
    ])
    model.compile(optimizer=tf.keras.optimizers.SGD(learning_rate=args.lr), loss='mse')
    model.fit(features, target, epochs=args.epochs, batch_size=32, shuffle=False)


if __name__ == '__main__':
    main()
