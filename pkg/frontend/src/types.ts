// Shared client-side types mirroring the service's JSON shapes.

export interface IterationSummary {
  index: number;
  rounds_used: number;
  reward_hash: string;
  reward_source: string;
  evaluation: {
    success_rate?: number;
    mean_return?: number;
    n_episodes?: number;
    env_steps?: number;
  };
  rollout_files: string[];
  description_draft: string;
  feedback: { description: string; improvement: string } | null;
}

export interface RunView {
  run_id: string;
  env_id: string;
  instruction: string;
  mode: string;
  status: string;
  iterations: IterationSummary[];
  error?: string;
}

export interface RunListItem {
  run_id: string;
  env_id: string;
  instruction: string;
  status: string;
  mode: string;
  iterations: number;
}

export interface CurvePoint {
  step: number;
  meanReturn: number;
  successRate: number;
}

export interface PlaybackFrame {
  step: number;
  positions: Record<string, [number, number, number]>;
  gripper?: number;
  grasped?: string | null;
  reward: number;
  success: boolean;
  qpos?: number;
  mean_vx?: number;
}

export interface RunEvent {
  seq: number;
  type: string;
  status?: string;
  iteration?: number;
  step?: number;
  success_rate?: number;
  mean_return?: number;
  error?: string;
}
