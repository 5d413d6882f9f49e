import logging
from dataclasses import dataclass

import numpy as np

from crhlab.linalg import try_alignment
from crhlab.netcore import ForwardRecord, LayerTape, MlpModel, output_jacobians

logger = logging.getLogger(__name__)

MAX_JACOBIAN_OUTPUTS = 64


@dataclass(frozen=True, eq=False)
class NfaReport:
    layer_index: int
    alpha_nfa: float | None
    alpha_enfa_backward: float | None
    alpha_enfa_forward: float | None
    b_matrix: np.ndarray
    b_isotropy: float | None


def nfa_check(model: MlpModel, record: ForwardRecord, tapes: list[LayerTape], layer: int,
              max_outputs: int = MAX_JACOBIAN_OUTPUTS) -> NfaReport:
    """
    Feature ansatz W^T W ~ E[J^T J] (J the output Jacobian w.r.t. h_a) next to its
    loss-gradient forms W^T W ~ G_a and W W^T ~ G_b. They coincide when
    B = E[grad_f l grad_f l^T] is proportional to the identity.
    """
    tape = tapes[layer]
    weight = model.layers[layer].augmented()
    n = tape.batch_size
    g_a = tape.g_a.T @ tape.g_a / n
    g_b = tape.g_b.T @ tape.g_b / n
    output_grad = tapes[-1].g_b
    b_matrix = output_grad.T @ output_grad / n

    alpha_nfa = None
    classes = record.prediction.shape[1]
    if classes > max_outputs:
        logger.info("layer %d: %d outputs exceed %d, skipping output Jacobians", layer, classes, max_outputs)
    else:
        jacobians = output_jacobians(model, record, layer)
        jtj = np.einsum('ncd,nce->de', jacobians, jacobians) / n
        alpha_nfa = try_alignment(weight.T @ weight, jtj)

    b_isotropy = try_alignment(b_matrix, np.eye(classes)) if classes > 1 else None
    return NfaReport(layer_index=layer, alpha_nfa=alpha_nfa,
                     alpha_enfa_backward=try_alignment(weight.T @ weight, g_a),
                     alpha_enfa_forward=try_alignment(weight @ weight.T, g_b),
                     b_matrix=b_matrix, b_isotropy=b_isotropy)
