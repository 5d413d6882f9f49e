from crhlab.tasks.streams import BLOCK_SIZE, TRAIN_STREAM, EVAL_STREAM, gaussian_rows
from crhlab.tasks.teacher import TeacherSpec, TeacherNet, teacher_sample
from crhlab.tasks.mixing import InputMixSpec, mixed_input_sample, mixed_teacher_sample
from crhlab.tasks.blobs import ClassBlobSpec, class_blob_sample
from crhlab.utils.matrix_store import dump_dataset

__all__ = [
    'BLOCK_SIZE', 'TRAIN_STREAM', 'EVAL_STREAM', 'gaussian_rows',
    'TeacherSpec', 'TeacherNet', 'teacher_sample',
    'InputMixSpec', 'mixed_input_sample', 'mixed_teacher_sample',
    'ClassBlobSpec', 'class_blob_sample', 'dump_dataset',
]
