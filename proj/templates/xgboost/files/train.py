"""Minimal training run for {{ project_name }}."""
import argparse

import seed_setup
import numpy as np
import xgboost as xgb


def parse_args():
    parser = argparse.ArgumentParser(description='Train {{ project_name }}.')
    parser.add_argument('--rounds', type=int, default=10)
    return parser.parse_args()


def main():
    args = parse_args()
    features = np.random.rand(256, 16)
    labels = (features.sum(axis=1) > 8).astype(int)
    dtrain = xgb.DMatrix(features, label=labels)

    param = {'seed': seed_setup.SEED,
             'objective': 'binary:logistic',
             'tree_method': 'hist',
             'max_depth': 4}
    booster = xgb.train(param, dtrain, num_boost_round=args.rounds)
    print(booster.eval(dtrain))


if __name__ == '__main__':
    main()
