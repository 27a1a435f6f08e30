// Floating menu: shoot a data panel, then a method panel, then an action.
// The tree is built from the engine's field listing.

import { PanelQuad } from "./picking.js";
import { FieldListing } from "./protocol.js";
import { Vec3 } from "./vec.js";

export const SCALAR_METHODS = ["Isosurface", "Orthoslice", "LocalSlice", "Volume"] as const;
export const VECTOR_METHODS = [
  "Tracer", "FieldLine", "LocalArrows", "Snowflakes", "Hotaru", "LIC",
] as const;

export interface MenuNode {
  id: string;
  label: string;
  children: MenuNode[];
  /** Set on leaves: the selection this panel commits. */
  selection?: { field: string; method: string };
}

export function buildMenu(listing: FieldListing): MenuNode {
  const fieldNode = (field: string, methods: readonly string[]): MenuNode => ({
    id: `data:${field}`,
    label: field,
    children: methods.map((m) => ({
      id: `method:${field}:${m}`,
      label: m,
      children: [],
      selection: { field, method: m },
    })),
  });
  return {
    id: "root",
    label: "data",
    children: [
      ...listing.scalars.map((f) => fieldNode(f, SCALAR_METHODS)),
      ...listing.vectors.map((f) => fieldNode(f, VECTOR_METHODS)),
    ],
  };
}

/** Lay a node's children out as a column of panels facing +z at a depth. */
export function layoutPanels(node: MenuNode, center: Vec3, panelWidth = 0.6,
                             panelHeight = 0.16, gap = 0.04): PanelQuad[] {
  const n = node.children.length;
  const pitch = panelHeight + gap;
  const top = center[1] + ((n - 1) * pitch) / 2;
  return node.children.map((child, i) => ({
    id: child.id,
    center: [center[0], top - i * pitch, center[2]] as Vec3,
    uAxis: [1, 0, 0] as Vec3,
    vAxis: [0, 1, 0] as Vec3,
    halfWidth: panelWidth / 2,
    halfHeight: panelHeight / 2,
  }));
}

export function findNode(root: MenuNode, id: string): MenuNode | null {
  if (root.id === id) return root;
  for (const c of root.children) {
    const hit = findNode(c, id);
    if (hit) return hit;
  }
  return null;
}
