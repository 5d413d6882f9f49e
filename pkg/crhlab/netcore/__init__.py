from crhlab.netcore.model import Activation, DenseLayer, MlpModel, init_mlp
from crhlab.netcore.loss import LossKind, LossEval, loss_eval
from crhlab.netcore.capture import (ForwardRecord, LayerTape, forward_capture, forward_from,
                                    backward_capture, backpropagate, output_jacobians)
from crhlab.netcore.optim import (OptimizerKind, TrainConfig, OptimizerState, ascent_direction,
                                  sgd_step, adam_step, optimizer_step)

__all__ = [
    'Activation', 'DenseLayer', 'MlpModel', 'init_mlp',
    'LossKind', 'LossEval', 'loss_eval',
    'ForwardRecord', 'LayerTape', 'forward_capture', 'forward_from', 'backward_capture',
    'backpropagate', 'output_jacobians',
    'OptimizerKind', 'TrainConfig', 'OptimizerState', 'ascent_direction',
    'sgd_step', 'adam_step', 'optimizer_step',
]
