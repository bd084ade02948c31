// Orthographic projections of world positions onto the playback canvases.
// Top view maps (x, y) and side view (x, z) into pixel space; the world
// window is fixed to the desk workspace so frames are comparable.

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export interface World {
  xMin: number;
  xMax: number;
  yMin: number; // second world axis: y for top view, z for side view
  yMax: number;
}

export const DESK_TOP: World = { xMin: -0.3, xMax: 0.3, yMin: -0.3, yMax: 0.3 };
export const DESK_SIDE: World = { xMin: -0.3, xMax: 0.3, yMin: 0.0, yMax: 0.45 };
export const MOVER_SIDE: World = { xMin: -1.0, xMax: 16.0, yMin: 0.0, yMax: 1.2 };

export function project(
  world: World,
  view: Viewport,
  wx: number,
  wy: number,
): [number, number] {
  const sx = (view.width - 2 * view.margin) / (world.xMax - world.xMin);
  const sy = (view.height - 2 * view.margin) / (world.yMax - world.yMin);
  const px = view.margin + (wx - world.xMin) * sx;
  // canvas y grows downward; world's second axis grows upward
  const py = view.height - view.margin - (wy - world.yMin) * sy;
  return [px, py];
}

export function topView(world: World, view: Viewport, pos: [number, number, number]) {
  return project(world, view, pos[0], pos[1]);
}

export function sideView(world: World, view: Viewport, pos: [number, number, number]) {
  return project(world, view, pos[0], pos[2]);
}

// marker colors per tracked entity, stable across frames
export const ENTITY_COLORS: Record<string, string> = {
  ee: "#2563eb",
  cubeA: "#dc2626",
  cubeB: "#16a34a",
  goal: "#9333ea",
  handle: "#d97706",
  trunk: "#dc2626",
};

export function colorFor(name: string): string {
  return ENTITY_COLORS[name] ?? "#6b7280";
}
