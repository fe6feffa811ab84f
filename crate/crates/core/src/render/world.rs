//! Ray-queryable scene geometry.
//!
//! Surface ids are assigned in a fixed order:
//!
//! 1. openings (windows, then doors, in `RoomSpec` order),
//! 2. the blackboard,
//! 3. the six shell faces in [`SHELL_FACES`] order,
//! 4. clutter boxes in `SceneSpec` order,
//! 5. chair parts, six per chair.
//!
//! Hits compare by `(distance, id)`, so a surface lying in a wall plane wins
//! the tie against the wall itself.

use serde::Serialize;

use crate::geometry::{plane_distance, Aabb, BoxHit, Ray, Vec3, YawBox};
use crate::scenegen::{OpeningKind, RoomSpec, SceneSpec, Wall, WallRect, CHAIR_ALBEDO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    Wall,
    Ceiling,
    Floor,
    Window,
    Door,
    Blackboard,
    Clutter,
    Chair,
}

impl SurfaceClass {
    pub fn is_architecture(self) -> bool {
        !matches!(self, SurfaceClass::Clutter | SurfaceClass::Chair)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub id: SurfaceId,
    pub class: SurfaceClass,
    /// Unit normal on the side the ray arrived from.
    pub normal: Vec3,
}

impl Hit {
    fn closer_than(&self, other: &Option<Hit>) -> bool {
        match other {
            None => true,
            Some(o) => self.t < o.t || (self.t == o.t && self.id < o.id),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellFace {
    Floor,
    Ceiling,
    Wall(Wall),
}

pub const SHELL_FACES: [ShellFace; 6] = [
    ShellFace::Floor,
    ShellFace::Ceiling,
    ShellFace::Wall(Wall::Back),
    ShellFace::Wall(Wall::Front),
    ShellFace::Wall(Wall::Left),
    ShellFace::Wall(Wall::Right),
];

fn face_index(face: ShellFace) -> u32 {
    SHELL_FACES.iter().position(|f| *f == face).unwrap() as u32
}

#[derive(Clone, Copy, Debug)]
struct WallSurface {
    rect: WallRect,
    class: SurfaceClass,
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Axis(Aabb),
    Yawed(YawBox),
}

#[derive(Clone, Copy, Debug)]
struct Object {
    id: SurfaceId,
    class: SurfaceClass,
    shape: Shape,
    bounds: Aabb,
}

impl Object {
    #[inline]
    fn intersect(&self, ray: &Ray) -> Option<BoxHit> {
        match &self.shape {
            Shape::Axis(b) => b.intersect(ray),
            Shape::Yawed(b) => b.intersect(ray),
        }
    }
}

/// Window as an emitter: corner, edge vectors and inward normal.
#[derive(Clone, Copy, Debug)]
pub struct WindowPatch {
    pub corner: Vec3,
    pub edge_u: Vec3,
    pub edge_v: Vec3,
    pub normal: Vec3,
    pub area: f64,
}

#[derive(Clone, Copy, Debug)]
enum BvhNode {
    Leaf {
        bounds: Aabb,
        start: u32,
        count: u32,
    },
    /// The left child immediately follows its parent.
    Inner { bounds: Aabb, right: u32 },
}

const LEAF_SIZE: usize = 2;

pub struct World {
    size: Vec3,
    wall_surfaces: Vec<WallSurface>,
    objects: Vec<Object>,
    nodes: Vec<BvhNode>,
    albedo: Vec<Vec3>,
    windows: Vec<WindowPatch>,
}

impl World {
    /// Room shell, openings and blackboard only.
    pub fn architecture(scene: &SceneSpec) -> Self {
        Self::build(scene, false)
    }

    /// Everything in the scene. Objects that enclose the camera position are
    /// left out, since the view from inside a box is undefined.
    pub fn full(scene: &SceneSpec) -> Self {
        Self::build(scene, true)
    }

    fn build(scene: &SceneSpec, with_objects: bool) -> Self {
        let room = &scene.room;
        let mut wall_surfaces = Vec::new();
        let mut albedo = Vec::new();
        for o in room.openings() {
            let (class, a) = match o.kind {
                OpeningKind::Window => (SurfaceClass::Window, Vec3::ZERO),
                OpeningKind::Door => (SurfaceClass::Door, room.materials.door),
            };
            wall_surfaces.push(WallSurface {
                rect: o.rect(),
                class,
            });
            albedo.push(a);
        }
        wall_surfaces.push(WallSurface {
            rect: room.blackboard,
            class: SurfaceClass::Blackboard,
        });
        albedo.push(Vec3::ZERO);
        for face in SHELL_FACES {
            albedo.push(match face {
                ShellFace::Floor => room.materials.floor,
                ShellFace::Ceiling => room.materials.ceiling,
                ShellFace::Wall(_) => room.materials.wall,
            });
        }

        let mut objects = Vec::new();
        if with_objects {
            let eye = scene.camera.position;
            let mut next = albedo.len() as u32;
            for c in &scene.clutter {
                let b = c.bounds(room);
                if !b.contains_strict(eye) {
                    objects.push(Object {
                        id: SurfaceId(next),
                        class: SurfaceClass::Clutter,
                        shape: Shape::Axis(b),
                        bounds: b,
                    });
                }
                albedo.push(c.albedo());
                next += 1;
            }
            for chair in &scene.chairs {
                for part in chair.parts(room) {
                    if !part.contains_strict(eye) {
                        objects.push(Object {
                            id: SurfaceId(next),
                            class: SurfaceClass::Chair,
                            shape: Shape::Yawed(part),
                            bounds: part.bounds(),
                        });
                    }
                    albedo.push(CHAIR_ALBEDO);
                    next += 1;
                }
            }
        }

        let windows = room
            .windows
            .iter()
            .map(|w| window_patch(room, &w.rect()))
            .collect();

        let mut world = World {
            size: Vec3::new(room.width_m, room.height_m, room.depth_m),
            wall_surfaces,
            objects,
            nodes: Vec::new(),
            albedo,
            windows,
        };
        world.build_bvh();
        world
    }

    pub fn windows(&self) -> &[WindowPatch] {
        &self.windows
    }

    /// Diffuse albedo of a surface. Windows report zero.
    pub fn albedo(&self, id: SurfaceId) -> Vec3 {
        self.albedo[id.0 as usize]
    }

    pub fn surface_count(&self) -> usize {
        self.albedo.len()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// Nearest strictly positive hit; ties go to the lower surface id.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let mut best = self.shell_hit(ray);
        self.nearest_object(ray, &mut best);
        best
    }

    /// True when some object blocks `ray` strictly before `t_max`. The shell
    /// is convex, so only objects can shadow one interior point from another.
    pub fn occluded(&self, ray: &Ray, t_max: f64) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = [0u32; 64];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let node_index = stack[top];
            match self.nodes[node_index as usize] {
                BvhNode::Leaf {
                    bounds,
                    start,
                    count,
                } => {
                    if bounds.slab(ray, t_max).is_none() {
                        continue;
                    }
                    for obj in &self.objects[start as usize..(start + count) as usize] {
                        if let Some(h) = obj.intersect(ray) {
                            if h.t > 0.0 && h.t < t_max {
                                return true;
                            }
                        }
                    }
                }
                BvhNode::Inner { bounds, right } => {
                    if bounds.slab(ray, t_max).is_some() {
                        stack[top] = right;
                        stack[top + 1] = node_index + 1;
                        top += 2;
                    }
                }
            }
        }
        false
    }

    fn shell_hit(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<(f64, ShellFace)> = None;
        let planes = [
            (
                0,
                ShellFace::Wall(Wall::Left),
                ShellFace::Wall(Wall::Right),
                self.size.x,
            ),
            (1, ShellFace::Floor, ShellFace::Ceiling, self.size.y),
            (
                2,
                ShellFace::Wall(Wall::Back),
                ShellFace::Wall(Wall::Front),
                self.size.z,
            ),
        ];
        for (axis, low, high, extent) in planes {
            let d = ray.dir.axis(axis);
            let (t, face) = if d > 0.0 {
                (plane_distance(ray, axis, extent), high)
            } else if d < 0.0 {
                (plane_distance(ray, axis, 0.0), low)
            } else {
                continue;
            };
            if t <= 0.0 || !t.is_finite() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bt, bf)) => t < bt || (t == bt && face_index(face) < face_index(bf)),
            };
            if better {
                best = Some((t, face));
            }
        }
        let (t, face) = best?;
        let base = self.wall_surfaces.len() as u32;
        match face {
            ShellFace::Floor => Some(Hit {
                t,
                id: SurfaceId(base + face_index(face)),
                class: SurfaceClass::Floor,
                normal: Vec3::new(0.0, 1.0, 0.0),
            }),
            ShellFace::Ceiling => Some(Hit {
                t,
                id: SurfaceId(base + face_index(face)),
                class: SurfaceClass::Ceiling,
                normal: Vec3::new(0.0, -1.0, 0.0),
            }),
            ShellFace::Wall(wall) => {
                let p = ray.at(t);
                let (u, v) = match wall {
                    Wall::Front | Wall::Back => (p.x, p.y),
                    Wall::Left | Wall::Right => (p.z, p.y),
                };
                let (id, class) = self
                    .wall_surfaces
                    .iter()
                    .enumerate()
                    .find(|(_, s)| s.rect.wall == wall && s.rect.contains(u, v))
                    .map(|(i, s)| (SurfaceId(i as u32), s.class))
                    .unwrap_or((SurfaceId(base + face_index(face)), SurfaceClass::Wall));
                Some(Hit {
                    t,
                    id,
                    class,
                    normal: RoomSpec::inward_normal(wall),
                })
            }
        }
    }

    fn nearest_object(&self, ray: &Ray, best: &mut Option<Hit>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = [0u32; 64];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            let node_index = stack[top];
            let limit = best.map_or(f64::INFINITY, |h| h.t);
            match self.nodes[node_index as usize] {
                BvhNode::Leaf {
                    bounds,
                    start,
                    count,
                } => {
                    if bounds.slab(ray, limit).is_none() {
                        continue;
                    }
                    for obj in &self.objects[start as usize..(start + count) as usize] {
                        if let Some(h) = obj.intersect(ray) {
                            let hit = Hit {
                                t: h.t,
                                id: obj.id,
                                class: obj.class,
                                normal: if h.normal.dot(ray.dir) > 0.0 {
                                    -h.normal
                                } else {
                                    h.normal
                                },
                            };
                            if hit.t > 0.0 && hit.closer_than(best) {
                                *best = Some(hit);
                            }
                        }
                    }
                }
                BvhNode::Inner { bounds, right } => {
                    if bounds.slab(ray, limit).is_some() {
                        stack[top] = right;
                        stack[top + 1] = node_index + 1;
                        top += 2;
                    }
                }
            }
        }
    }

    fn build_bvh(&mut self) {
        if self.objects.is_empty() {
            return;
        }
        let n = self.objects.len();
        let mut objects = std::mem::take(&mut self.objects);
        let mut nodes = Vec::with_capacity(2 * n);
        build_node(&mut objects, 0, n, &mut nodes);
        self.objects = objects;
        self.nodes = nodes;
    }
}

fn build_node(objects: &mut [Object], start: usize, end: usize, nodes: &mut Vec<BvhNode>) -> u32 {
    let slice = &mut objects[start..end];
    let bounds = slice.iter().fold(Aabb::empty(), |b, o| b.union(&o.bounds));
    let index = nodes.len() as u32;
    if slice.len() <= LEAF_SIZE {
        nodes.push(BvhNode::Leaf {
            bounds,
            start: start as u32,
            count: slice.len() as u32,
        });
        return index;
    }
    let centroids = slice
        .iter()
        .fold(Aabb::empty(), |b, o| b.grow(o.bounds.center()));
    let extent = centroids.extent();
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    // Total order on (centroid, id) keeps the build independent of input
    // permutation quirks.
    slice.sort_by(|a, b| {
        a.bounds
            .center()
            .axis(axis)
            .total_cmp(&b.bounds.center().axis(axis))
            .then(a.id.cmp(&b.id))
    });
    let mid = start + slice.len() / 2;
    nodes.push(BvhNode::Inner { bounds, right: 0 });
    build_node(objects, start, mid, nodes);
    let right = build_node(objects, mid, end, nodes);
    nodes[index as usize] = BvhNode::Inner { bounds, right };
    index
}

fn window_patch(room: &RoomSpec, rect: &WallRect) -> WindowPatch {
    let corner = room.wall_point(rect.wall, rect.u_offset, rect.v_offset, 0.0);
    let along = match rect.wall {
        Wall::Front | Wall::Back => Vec3::new(1.0, 0.0, 0.0),
        Wall::Left | Wall::Right => Vec3::new(0.0, 0.0, 1.0),
    };
    WindowPatch {
        corner,
        edge_u: along * rect.width_m,
        edge_v: Vec3::new(0.0, rect.height_m, 0.0),
        normal: RoomSpec::inward_normal(rect.wall),
        area: rect.width_m * rect.height_m,
    }
}
