// Payload shapes of the study service API. The client never computes rules
// or scores itself; it renders exactly what these carry.

export type Cell = [number, number];

export interface PublicState {
  session_id: string;
  round_index: number;
  rounds_total: number;
  session_complete: boolean;
  board?: number[][];
  num_colors?: number;
  score?: number;
  moves_made?: number;
  moves_remaining?: number;
  round_scores: number[];
  total_score?: number;
}

export interface MatchGroupView {
  color: number;
  cells: Cell[];
}

export interface StepView {
  multiplier: number;
  points: number;
  groups: MatchGroupView[];
  cleared: Cell[];
  grid_after: number[][];
}

export interface MoveReply {
  valid: boolean;
  points_gained: number;
  moves_available: number;
  steps: StepView[];
  reshuffled: boolean;
  round_completed: boolean;
  state: PublicState;
}

export interface CreateSessionReply {
  session_id: string;
  state: PublicState;
}

export interface PresetInfo {
  id: string;
  width: number;
  height: number;
  num_colors: number;
}

export interface TraceSummary {
  schema: string;
  round_index: number;
  final_score: number;
  moves: { a: Cell; b: Cell; valid: boolean; points: number }[];
}

export interface StudySummary {
  rows: string[];
  boards: Record<string, { average: number; maximum: number; minimum: number }>;
  random_average: { average: number; maximum: number; minimum: number } | null;
  sessions: number;
}

export interface ApiError {
  error: string;
  detail?: string;
}
