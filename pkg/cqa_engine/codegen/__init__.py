'''Datalog code generation: garbage-set rules, cycle reduction rules and the composed
certain-answer program.'''

from .garbage_program import CycleEmitter, emit_garbage_program
from .pipeline_program import PipelineProgram, compose_pipeline, pick_unattacked
from .reduction_program import ReductionPlan, emit_reduction_program, reduction_plan
from .stage import NameAllocator, Stage

__all__ = [
    'CycleEmitter', 'NameAllocator', 'PipelineProgram', 'ReductionPlan', 'Stage',
    'compose_pipeline', 'emit_garbage_program', 'emit_reduction_program', 'pick_unattacked',
    'reduction_plan',
]
