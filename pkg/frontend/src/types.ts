/** Shapes of the HTTP API bodies the workbench consumes. */

export interface SessionInfo {
  session_id: string;
  revision: number;
  dirty: boolean;
}

export interface ConsistencyInfo {
  lambda_max: number;
  ci: number;
  ri: number;
  cr: number;
  consistent: boolean;
}

export interface CellInfo {
  i: number;
  j: number;
  value: number;
  reciprocal: number;
}

export interface GroupFeedback extends SessionInfo {
  group: string;
  complete: boolean;
  cells: CellInfo[];
  weights?: number[];
  consistency?: ConsistencyInfo;
}

export interface ScaleLevel {
  label: string;
  score: number;
  threshold: number;
}

export interface HierarchyNode {
  id: string;
  name: string;
  kind: "goal" | "criterion" | "indicator";
  children?: HierarchyNode[];
  local_weight?: number;
}

export interface HierarchyResponse extends SessionInfo {
  hierarchy: HierarchyNode;
  scale: { levels: ScaleLevel[] };
}

export interface RankingEntry {
  provider_id: string;
  score: number;
  level: string;
}

export interface CriterionResult {
  vector: number[];
  level: string;
  score: number;
}

export interface ProviderResult {
  provider_id: string;
  goal_vector: number[];
  level: string;
  score: number;
  per_criterion: Record<string, CriterionResult>;
  weights_used: Record<string, number>;
  warnings: string[];
}

export interface EvaluationReport {
  results: ProviderResult[];
  ranking: RankingEntry[];
  consistency: Record<string, ConsistencyInfo>;
}

export interface SensitivityEntry {
  node_id: string;
  delta: number;
  scores: Record<string, number>;
  ranking: string[];
  rank_changed: boolean;
}

export interface SensitivityResponse {
  base_ranking: string[];
  stable: boolean;
  entries: SensitivityEntry[];
}

export interface GroupWeights {
  group: string;
  complete: boolean;
  weights?: number[];
  consistency?: ConsistencyInfo;
  explicit?: boolean;
}

export interface WeightsResponse extends SessionInfo {
  groups: Record<string, GroupWeights>;
  global_weights: Record<string, number> | null;
}

export interface BallotInput {
  expert_id: string;
  factor_id: string;
  level: string;
}
