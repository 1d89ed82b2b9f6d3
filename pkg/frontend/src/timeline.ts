// The mission event feed: newest first, with teleop requests pinned
// until the operator acknowledges them.

import type { ErrorFrame, EventFrame, PlanFrame } from "./protocol";

export interface TimelineRow {
  id: number;
  step: number;
  kind: string;
  summary: string;
  pinned: boolean;
  object?: string;
}

export interface EdgeInfo {
  behavior: string;
  object_params: string[];
}

const PINNED_KINDS = new Set(["teleop_requested", "teleop_affordance"]);
const MAX_ROWS = 500;

export class Timeline {
  rows: TimelineRow[] = []; // newest first
  private nextId = 1;

  constructor(private edgeInfo: (edgeId: number) => EdgeInfo | undefined) {}

  get pinned(): TimelineRow[] {
    return this.rows.filter((row) => row.pinned);
  }

  acknowledge(id: number): void {
    const row = this.rows.find((r) => r.id === id);
    if (row) row.pinned = false;
  }

  pushEvent(frame: EventFrame): TimelineRow | null {
    if (frame.kind === "perception") return null; // too chatty for a feed
    const summary = this.summarize(frame);
    if (summary === null) return null;
    const payload = frame.payload;
    const pinned =
      frame.kind === "notification" && PINNED_KINDS.has(payload.kind);
    return this.addRow(frame.step, frame.kind, summary, pinned,
                       pinned ? payload.object : undefined);
  }

  pushPlan(frame: PlanFrame): TimelineRow | null {
    if (!frame.plan) return null;
    const summary = `step ${frame.step} · plan to node ${frame.plan.goal}`
      + ` · ${frame.plan.edges.length} edges,`
      + ` cost ${frame.plan.total_cost.toFixed(1)}`;
    return this.addRow(frame.step, "plan", summary, false);
  }

  pushError(frame: ErrorFrame): TimelineRow {
    return this.addRow(frame.step, "error",
                       `step ${frame.step} · ${frame.reason}`, false);
  }

  private addRow(step: number, kind: string, summary: string, pinned: boolean,
                 object?: string): TimelineRow {
    const row: TimelineRow = { id: this.nextId++, step, kind, summary, pinned,
                               object };
    this.rows.unshift(row);
    if (this.rows.length > MAX_ROWS) {
      // drop the oldest unpinned row
      for (let i = this.rows.length - 1; i >= 0; i -= 1) {
        if (!this.rows[i].pinned) {
          this.rows.splice(i, 1);
          break;
        }
      }
    }
    return row;
  }

  private behaviorName(edgeId: number): string {
    const info = this.edgeInfo(edgeId);
    if (!info) return `edge ${edgeId}`;
    const params = info.object_params.join(" ");
    return params ? `${info.behavior} ${params}` : info.behavior;
  }

  private summarize(frame: EventFrame): string | null {
    const p = frame.payload;
    const at = `step ${frame.step}`;
    switch (frame.kind) {
      case "behavior_outcome":
        return `${at} · ${this.behaviorName(p.edge)} · ${p.status}`;
      case "decision":
        if (p.decision === "execute_edge") {
          return `${at} · executing ${this.behaviorName(p.edge)}`;
        }
        if (p.decision === "idle") return `${at} · idle · ${p.reason}`;
        return `${at} · mission complete decision`;
      case "autonomy_changed":
        return `${at} · autonomy level ${p.level} (was ${p.previous})`;
      case "command": {
        const verdict = p.accepted ? "accepted" : "refused";
        return `${at} · ${p.command.type} ${verdict}`;
      }
      case "notification":
        if (PINNED_KINDS.has(p.kind)) {
          return `${at} · teleoperation requested · ${p.object}`;
        }
        if (p.kind === "rejected") {
          return `${at} · ${p.command.type} rejected · ${p.reason}`;
        }
        return `${at} · ${p.kind}`;
      case "mission_complete": {
        const coverage = (p.coverage_fraction * 100).toFixed(1);
        return `${at} · mission complete · ${coverage}% covered`
          + ` in ${p.steps} steps`;
      }
      case "graph_delta":
        return null; // rendered on the map, not in the feed
      default:
        return `${at} · ${frame.kind}`;
    }
  }
}
