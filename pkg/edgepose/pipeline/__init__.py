"""Pipeline orchestration"""

from edgepose.pipeline.pipeline_runner import (STAGES, PipelineResult, PipelineRunner, PipelineStep,
                                               estimate_poses, warm_up_kernels)

__all__ = ['STAGES', 'PipelineResult', 'PipelineRunner', 'PipelineStep', 'estimate_poses', 'warm_up_kernels']
